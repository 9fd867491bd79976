"""Tests for the proportional-fair scheduler."""

import numpy as np
import pytest

from railcell.radio.src.exceptions import InvalidConfigurationError
from railcell.system.src.scheduler import PfState, pf_schedule, update_pf_state


class TestPfSchedule:
    """Test cases for per-slot PF allocation."""

    def test_single_ue_gets_every_slot(self):
        """Test that a lone UE is scheduled on all 100 RBs."""
        rates = np.full((1, 100), 1e5)
        grid = pf_schedule(rates, PfState.initial(1))

        assert np.all(grid.assignment == 0)
        assert grid.achieved_bps[0] == pytest.approx(100 * 1e5)

    def test_tie_goes_to_lowest_index(self):
        """Test that equal metrics are broken toward the lowest UE."""
        grid = pf_schedule(np.ones((3, 10)), PfState.initial(3))
        assert np.all(grid.assignment == 0)

    def test_metric_prefers_higher_ratio(self):
        """Test UE A winning the one RB where its rate is doubled."""
        r = 1e5
        rates = np.vstack([np.zeros(100), np.full(100, r)])
        rates[0, 1] = 2 * r
        grid = pf_schedule(rates, PfState.initial(2))

        assert grid.assignment[1] == 0
        assert np.all(np.delete(grid.assignment, 1) == 1)

    def test_average_throughput_weights_metric(self):
        """Test that a starved UE wins against a higher instantaneous rate."""
        state = PfState(np.array([1e6, 1e3]))
        grid = pf_schedule(np.array([[2e5], [1e5]]), state)
        assert grid.assignment.tolist() == [1]

    def test_work_conservation(self):
        """Test that every slot is assigned when UEs are attached."""
        rng = np.random.default_rng(2)
        grid = pf_schedule(rng.exponential(1e5, size=(5, 200)), PfState.initial(5))

        assert np.all(grid.assignment >= 0)
        assert grid.slot_counts().sum() == 200
        assert not grid.is_idle

    def test_no_ues_idles(self):
        """Test that a cell without UEs returns an idle grid."""
        grid = pf_schedule(np.zeros((0, 100)), PfState.initial(0))

        assert grid.is_idle
        assert grid.achieved_bps.size == 0

    def test_state_size_mismatch(self):
        """Test that rates and state must describe the same UEs."""
        with pytest.raises(ValueError):
            pf_schedule(np.ones((2, 5)), PfState.initial(3))

    def test_long_run_fairness(self):
        """Test a 50/50 split between statistically identical UEs over 10^4 TTIs."""
        rng = np.random.default_rng(7)
        state = PfState.initial(2)
        total = np.zeros(2)

        for _ in range(10_000):
            rates = rng.exponential(1e5, size=(2, 100))
            grid = pf_schedule(rates, state)
            state = update_pf_state(state, grid.achieved_bps)
            total += grid.achieved_bps

        share = total[0] / total.sum()
        assert share == pytest.approx(0.5, abs=0.02)

    def test_single_ue_reaches_best_rate(self):
        """Test that PF adds no loss with one UE per cell."""
        rates = np.random.default_rng(0).exponential(1e5, size=(1, 100))
        grid = pf_schedule(rates, PfState.initial(1))
        assert grid.achieved_bps[0] == pytest.approx(rates.sum())


class TestPfState:
    """Test cases for the PF average update."""

    def test_initial_state(self):
        """Test cold start at epsilon."""
        state = PfState.initial(3, epsilon_bps=1.0)
        np.testing.assert_array_equal(state.avg_throughput_bps, [1.0, 1.0, 1.0])

    def test_fixed_point(self):
        """Test that achieving the average leaves it unchanged."""
        state = PfState(np.array([5e6, 2e6]))
        updated = update_pf_state(state, np.array([5e6, 2e6]))
        np.testing.assert_allclose(updated.avg_throughput_bps, [5e6, 2e6])

    def test_exponential_update(self):
        """Test (1 - beta) T + beta r."""
        state = PfState(np.array([1000.0]), beta=0.1)
        updated = update_pf_state(state, np.array([2000.0]))
        assert updated.avg_throughput_bps[0] == pytest.approx(1100.0)

    def test_no_memory(self):
        """Test that beta = 1 replaces the average."""
        state = PfState(np.array([1000.0, 3.0]), beta=1.0)
        updated = update_pf_state(state, np.array([7.0, 0.0]))
        np.testing.assert_array_equal(updated.avg_throughput_bps, [7.0, 0.0])

    def test_zero_throughput_still_schedulable(self):
        """Test that a decayed average is floored by epsilon in the metric."""
        state = PfState(np.array([0.0, 0.0]), beta=1.0)
        grid = pf_schedule(np.array([[1.0], [2.0]]), state)
        assert grid.assignment.tolist() == [1]

    @pytest.mark.parametrize("beta", [0.0, 1.5])
    def test_invalid_beta(self, beta):
        """Test that the forgetting factor must lie in (0, 1]."""
        with pytest.raises(InvalidConfigurationError):
            PfState.initial(2, beta=beta)

    def test_state_is_immutable(self):
        """Test that the average array cannot be modified in place."""
        state = PfState.initial(2)
        with pytest.raises(ValueError):
            state.avg_throughput_bps[0] = 5.0
