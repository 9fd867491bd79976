"""Proportional-fair allocation of RB slots under full-buffer traffic."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ...radio.src.exceptions import InvalidConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PfState:
    """Exponentially averaged throughput of the UEs of one cell."""

    avg_throughput_bps: np.ndarray = field(repr=False)
    beta: float = 0.001
    epsilon_bps: float = 1.0

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise InvalidConfigurationError(f"PF forgetting factor must be in (0, 1], got {self.beta}")
        if self.epsilon_bps <= 0:
            raise InvalidConfigurationError(f"PF epsilon must be positive, got {self.epsilon_bps}")
        avg = np.asarray(self.avg_throughput_bps, dtype=float)
        avg.setflags(write=False)
        object.__setattr__(self, "avg_throughput_bps", avg)

    @classmethod
    def initial(cls, n_ues: int, beta: float = 0.001, epsilon_bps: float = 1.0) -> "PfState":
        """Cold-start state: every average starts at `epsilon_bps`."""
        return cls(np.full(n_ues, float(epsilon_bps)), beta, epsilon_bps)

    @property
    def n_ues(self) -> int:
        return self.avg_throughput_bps.size


@dataclass(frozen=True)
class ScheduleGrid:
    """Slot-to-UE assignment of one cell for one TTI."""

    assignment: np.ndarray  # (n_slots,) local UE index, -1 when idle
    achieved_bps: np.ndarray  # (n_ues,)

    @property
    def is_idle(self) -> bool:
        return self.assignment.size == 0 or bool(np.all(self.assignment < 0))

    def slot_counts(self) -> np.ndarray:
        valid = self.assignment[self.assignment >= 0]
        return np.bincount(valid, minlength=self.achieved_bps.size)


def pf_schedule(achievable_bps: np.ndarray, state: PfState) -> ScheduleGrid:
    """Give every slot to the UE with the highest rate-to-average ratio.

    Args:
        achievable_bps: Rate each UE would get on each slot, shaped (n_ues, n_slots)
        state: Averages of the same UEs, in the same order

    Returns:
        ScheduleGrid; ties go to the lowest UE index, no UEs gives an idle grid
    """
    achievable_bps = np.asarray(achievable_bps, dtype=float)
    if achievable_bps.ndim != 2:
        raise ValueError(f"Achievable rates must be 2-D (n_ues, n_slots), got {achievable_bps.shape}")
    n_ues, n_slots = achievable_bps.shape
    if n_ues == 0:
        return ScheduleGrid(np.full(n_slots, -1, dtype=int), np.zeros(0))
    if n_ues != state.n_ues:
        raise ValueError(f"Rates cover {n_ues} UEs but the PF state tracks {state.n_ues}")

    metric = achievable_bps / np.maximum(state.avg_throughput_bps, state.epsilon_bps)[:, None]
    # argmax returns the first maximum, i.e. the lowest UE index on ties
    assignment = np.argmax(metric, axis=0)
    achieved = np.bincount(
        assignment, weights=achievable_bps[assignment, np.arange(n_slots)], minlength=n_ues
    )
    return ScheduleGrid(assignment, achieved)


def update_pf_state(state: PfState, achieved_bps: np.ndarray) -> PfState:
    """T_u <- (1 - beta) T_u + beta * achieved_u."""
    achieved_bps = np.asarray(achieved_bps, dtype=float)
    avg = (1.0 - state.beta) * state.avg_throughput_bps + state.beta * achieved_bps
    return PfState(avg, state.beta, state.epsilon_bps)
