"""Tests for association and the RU collaboration schemes."""

import numpy as np
import pytest

from railcell.radio.src.channel import AntennaPattern, PathlossParams
from railcell.radio.src.exceptions import CoverageError
from railcell.radio.src.geometry import (
    FORWARD,
    RadioUnit,
    TrackLayout,
    TrainState,
    build_radio_units,
    place_ues_evenly,
    ue_track_positions,
)
from railcell.system.src.schemes import (
    SchemeKind,
    associate,
    expected_next_site_fraction,
    link_budget,
    per_ru_load,
    relay_terminal,
    visible_rus,
    wideband_rx_power_dbm,
)

TRAIN_LENGTH_M = 200.84


@pytest.fixture
def layout():
    return TrackLayout.equidistant(4, 1000.0)


@pytest.fixture
def rus(layout):
    return build_radio_units(layout)


def _budget(positions, rus, layout, penetration_db=30.0):
    return link_budget(np.asarray(positions, dtype=float), rus, layout, PathlossParams(), AntennaPattern(), penetration_db)


class TestVisibility:
    """Test cases for RU visibility."""

    def test_mid_span_sees_four_rus(self, rus, layout):
        """Test that a UE at 1500 m sees the four RUs facing it."""
        visible = visible_rus(1500.0, rus, layout)
        assert [ru.id for ru in visible] == [1, 3, 4, 6]

    def test_abeam_site_sees_both_site_rus(self, rus, layout):
        """Test that the 90 degree boundary is inclusive."""
        ids = {ru.id for ru in visible_rus(1000.0, rus, layout)}
        assert {2, 3} <= ids

    def test_single_site(self):
        """Test a one-site layout with a UE down the forward boresight."""
        layout = TrackLayout((0.0,))
        visible = visible_rus(500.0, build_radio_units(layout), layout)
        assert [ru.id for ru in visible] == [1]

    def test_no_coverage(self):
        """Test that a UE behind every RU has no coverage."""
        layout = TrackLayout((0.0,))
        with pytest.raises(CoverageError):
            visible_rus(-500.0, [RadioUnit(0, 0, FORWARD)], layout)


class TestWidebandPower:
    """Test cases for the association metric."""

    def test_one_kilometre_with_penetration(self, rus, layout):
        """Test 46.02 dBm minus 133.35 dB of macro loss."""
        power = wideband_rx_power_dbm(2000.0, rus[3], layout, PathlossParams(), AntennaPattern(), 30.0)
        assert power == pytest.approx(-87.33, abs=0.02)

    def test_one_kilometre_without_penetration(self, rus, layout):
        """Test the same link outside the carriage."""
        power = wideband_rx_power_dbm(2000.0, rus[3], layout, PathlossParams(), AntennaPattern(), 0.0)
        assert power == pytest.approx(-57.33, abs=0.02)

    def test_mirror_rus_receive_equal_power(self, rus, layout):
        """Test symmetry of the two RUs facing the span midpoint region."""
        args = (layout, PathlossParams(), AntennaPattern(), 30.0)
        assert wideband_rx_power_dbm(1400.0, rus[3], *args) == pytest.approx(
            wideband_rx_power_dbm(1600.0, rus[4], *args)
        )


class TestAssociate:
    """Test cases for per-scheme association."""

    def test_baseline_strongest_serves(self, rus, layout):
        """Test that the nearer facing RU serves and the rest interfere."""
        association = associate(_budget([1400.0, 1600.0], rus, layout), rus, SchemeKind.BASELINE)

        assert association.serving == ((3,), (4,))
        assert association.interferers == ((1, 4, 6), (1, 3, 6))
        assert association.muted_rus == frozenset()

    def test_baseline_tie_goes_to_lower_id(self, rus, layout):
        """Test the midpoint tie between the two facing RUs."""
        association = associate(_budget([1500.0], rus, layout), rus, "baseline")
        assert association.serving == ((3,),)

    def test_coordination_mutes_second_strongest(self, rus, layout):
        """Test that the second dominant RU is omitted, not counted as interference."""
        association = associate(_budget([1400.0], rus, layout), rus, SchemeKind.COORDINATION)

        assert association.serving == ((3,),)
        assert association.muted == ((4,),)
        assert association.interferers == ((1, 6),)

    def test_cooperation_pair_serves(self, rus, layout):
        """Test that the dominant pair serves jointly as one merged cell."""
        association = associate(_budget([1400.0, 1600.0], rus, layout), rus, SchemeKind.COOPERATION)

        assert association.serving == ((3, 4), (3, 4))
        assert association.interferers == ((1, 6), (1, 6))
        assert len(association.cells) == 1
        cell = association.cells[0]
        assert cell.cell_id == 3
        assert cell.ru_ids == (3, 4)
        assert cell.ue_ids == (0, 1)

    def test_coordination_merges_dominant_pair(self, rus, layout):
        """Test that coordinated UEs of one RU pair share a single scheduling cell."""
        association = associate(_budget([1400.0, 1600.0], rus, layout), rus, SchemeKind.COORDINATION)

        assert association.serving == ((3,), (4,))
        assert association.muted == ((4,), (3,))
        assert association.interferers == ((1, 6), (1, 6))
        assert len(association.cells) == 1
        assert association.cells[0].ru_ids == (3, 4)
        assert association.cells[0].ue_ids == (0, 1)

    def test_baseline_keeps_cells_per_ru(self, rus, layout):
        """Test that baseline UEs on different RUs stay in separate cells."""
        association = associate(_budget([1400.0, 1600.0], rus, layout), rus, SchemeKind.BASELINE)

        assert [cell.ru_ids for cell in association.cells] == [(3,), (4,)]

    def test_cooperation_serving_set_size(self, rus, layout):
        """Test that every UE has two serving RUs under cooperation."""
        positions = np.linspace(1050.0, 1950.0, 19)
        association = associate(_budget(positions, rus, layout), rus, SchemeKind.COOPERATION)
        assert all(len(serving) == 2 for serving in association.serving)

    @pytest.mark.parametrize("scheme", ["baseline", "coordination", "cooperation"])
    def test_every_visible_ru_accounted_once(self, rus, layout, scheme):
        """Test that serving, interfering and muted sets partition the visible RUs."""
        positions = np.linspace(900.0, 2100.0, 25)
        budget = _budget(positions, rus, layout)
        association = associate(budget, rus, scheme)

        for ue in range(len(positions)):
            sets = [set(association.serving[ue]), set(association.interferers[ue]), set(association.muted[ue])]
            visible = {int(i) for i in np.flatnonzero(budget.visible[ue])}
            assert sets[0].isdisjoint(sets[1])
            assert sets[0].isdisjoint(sets[2])
            assert sets[1].isdisjoint(sets[2])
            assert sets[0] | sets[1] | sets[2] == visible
            assert sets[0]

    def test_power_scaling_keeps_association(self, layout):
        """Test that a common transmit power factor does not change association."""
        positions = np.linspace(1000.0, 2000.0, 21)
        low = build_radio_units(layout, tx_power_w=4.0)
        high = build_radio_units(layout, tx_power_w=400.0)

        a = associate(_budget(positions, low, layout), low, SchemeKind.COORDINATION)
        b = associate(_budget(positions, high, layout), high, SchemeKind.COORDINATION)
        assert a.serving == b.serving
        assert a.muted == b.muted

    def test_load_sums_to_ue_count(self, rus, layout):
        """Test that per-cell loads add up to the UE count."""
        positions = np.linspace(1400.0, 1600.0, 46)
        for scheme in ("baseline", "coordination", "cooperation"):
            association = associate(_budget(positions, rus, layout), rus, scheme)
            assert sum(per_ru_load(association).values()) == 46

    def test_all_ues_on_one_ru(self, rus, layout):
        """Test the load of a train well inside one RU's half-span."""
        positions = np.linspace(1100.0, 1300.0, 46)
        association = associate(_budget(positions, rus, layout), rus, SchemeKind.BASELINE)
        assert per_ru_load(association) == {3: 46}

    def test_relay_terminal(self, layout, rus):
        """Test that the relay replaces all passengers with one roof antenna."""
        train = TrainState(TRAIN_LENGTH_M, center_m=1450.0)
        positions, relay_layout = relay_terminal(train, layout, 4.0)

        association = associate(_budget(positions, rus, relay_layout, 0.0), rus, SchemeKind.BASELINE)
        assert positions.tolist() == [1450.0]
        assert relay_layout.ue_height_m == 4.0
        assert sum(per_ru_load(association).values()) == 1


class TestReassignmentOnset:
    """Test cases for the share of UEs already on the next site."""

    def test_no_reassignment_before_onset(self):
        """Test that no UE has crossed the midpoint at 399 m."""
        assert expected_next_site_fraction(399.0, TRAIN_LENGTH_M) == 0.0
        assert expected_next_site_fraction(399.58, TRAIN_LENGTH_M) == pytest.approx(0.0, abs=1e-9)

    def test_linear_share_after_onset(self):
        """Test the closed-form share inside the transition region."""
        expected = (450.0 + 100.42 - 500.0) / 200.84
        assert expected_next_site_fraction(450.0, TRAIN_LENGTH_M) == pytest.approx(expected, abs=1e-9)
        assert expected_next_site_fraction(450.0, TRAIN_LENGTH_M) == pytest.approx(0.2511, abs=1e-4)

    def test_fully_reassigned(self):
        """Test that the whole train is on the next site past 600.42 m."""
        assert expected_next_site_fraction(700.0, TRAIN_LENGTH_M) == 1.0

    @pytest.mark.parametrize("center_rel_m", [399.0, 450.0, 520.0])
    def test_association_matches_expected_share(self, rus, layout, center_rel_m):
        """Test that evenly placed UEs move to the next site at the expected rate."""
        train = TrainState(TRAIN_LENGTH_M, center_m=1000.0 + center_rel_m)
        positions = ue_track_positions(train, place_ues_evenly(10_000, TRAIN_LENGTH_M))
        association = associate(_budget(positions, rus, layout), rus, SchemeKind.BASELINE)

        next_site = {ru.id for ru in rus if ru.site_index == 2}
        share = np.mean([association.serving[ue][0] in next_site for ue in range(len(positions))])
        assert share == pytest.approx(expected_next_site_fraction(center_rel_m, TRAIN_LENGTH_M), abs=2e-4)
