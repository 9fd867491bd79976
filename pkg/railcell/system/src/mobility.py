"""Handover bursts, moving-cell rerouting and control-channel blocking."""

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from ...radio.src.exceptions import CoverageError, InvalidConfigurationError
from ...radio.src.geometry import RadioUnit, TrackLayout
from .config import ScenarioConfig

logger = logging.getLogger(__name__)

# boundaries within this distance of the trajectory end still count as crossed
END_TOLERANCE_M = 1e-6


class MobilityMode(StrEnum):
    PER_UE = "per_ue"
    MOVING_CELL = "moving_cell"


class HandoverKind(StrEnum):
    """What crossing a boundary costs on the control channel."""

    PER_UE = "per_ue"  # every passenger hands over
    REROUTE = "reroute"  # data stream moves to the next RU, no UE signaling


@dataclass(frozen=True)
class CellPlan:
    """Cell boundaries along the track, plus optional in-cell reroute points."""

    cell_length_m: float
    boundaries_m: tuple[float, ...]
    reroute_points_m: tuple[float, ...] = ()
    ru_to_cell: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.cell_length_m <= 0:
            raise InvalidConfigurationError(f"Cell length must be positive, got {self.cell_length_m}")
        if np.any(np.diff(self.boundaries_m) <= 0):
            raise InvalidConfigurationError(
                "Cell boundaries must be strictly increasing", {"boundaries_m": self.boundaries_m}
            )

    @classmethod
    def uniform(
        cls,
        cell_length_m: float,
        extent_m: float,
        start_m: float = 0.0,
        ru_span_m: float | None = None,
        rus: list[RadioUnit] | None = None,
        layout: TrackLayout | None = None,
    ) -> "CellPlan":
        """Equal cells of `cell_length_m` covering [start_m, start_m + extent_m].

        Args:
            cell_length_m: Cell length (conventional ~1 km, moving cell up to 50 km)
            extent_m: Track length the plan must cover
            start_m: Coordinate of the first boundary
            ru_span_m: If set, the data stream is rerouted every `ru_span_m` inside a cell
            rus: Radio units to map onto cells
            layout: Site positions of `rus`
        """
        if cell_length_m <= 0:
            raise InvalidConfigurationError(f"Cell length must be positive, got {cell_length_m}")
        n_cells = max(1, math.ceil(extent_m / cell_length_m - 1e-9))
        boundaries = tuple(start_m + k * cell_length_m for k in range(n_cells + 1))

        reroutes = ()
        if ru_span_m is not None:
            if ru_span_m <= 0:
                raise InvalidConfigurationError(f"RU span must be positive, got {ru_span_m}")
            n_spans = math.floor((boundaries[-1] - start_m) / ru_span_m + 1e-9)
            points = (start_m + j * ru_span_m for j in range(1, n_spans + 1))
            reroutes = tuple(
                p for p in points if min(abs(p - b) for b in boundaries) > END_TOLERANCE_M
            )

        ru_to_cell = {}
        if rus is not None and layout is not None:
            for ru in rus:
                offset = ru.position_m(layout) - start_m
                ru_to_cell[ru.id] = min(max(0, math.floor(offset / cell_length_m)), n_cells - 1)

        return cls(cell_length_m, boundaries, reroutes, ru_to_cell)


@dataclass(frozen=True)
class HandoverEvent:
    time_s: float
    boundary_m: float
    ue_count: int
    kind: HandoverKind


@dataclass(frozen=True)
class SignalingModel:
    """Control channel that completes `capacity_per_s` handovers per second."""

    capacity_per_s: float

    def __post_init__(self):
        if self.capacity_per_s <= 0:
            raise InvalidConfigurationError(
                f"Signaling capacity must be positive, got {self.capacity_per_s}"
            )


@dataclass(frozen=True)
class Trajectory:
    """Constant-speed run of the train front starting at `start_m`."""

    start_m: float
    speed_mps: float
    duration_s: float

    @classmethod
    def from_distance(cls, start_m: float, speed_mps: float, distance_m: float) -> "Trajectory":
        duration = distance_m / speed_mps if speed_mps > 0 else 0.0
        return cls(start_m, speed_mps, duration)

    @property
    def end_m(self) -> float:
        return self.start_m + self.speed_mps * self.duration_s


@dataclass(frozen=True)
class MobilityRow:
    mode: MobilityMode
    cell_length_m: float
    speed_kmh: float
    handover_period_s: float
    total_per_ue_handovers: int
    blocked_ues: int


def handover_period(cell_length_m: float, speed_mps: float) -> float:
    """Time to traverse one cell; infinite for a stationary train."""
    if cell_length_m <= 0:
        raise InvalidConfigurationError(f"Cell length must be positive, got {cell_length_m}")
    if speed_mps <= 0:
        return math.inf
    return cell_length_m / speed_mps


def handover_trace(
    trajectory: Trajectory,
    plan: CellPlan,
    n_ues: int,
    mode: MobilityMode | str = MobilityMode.PER_UE,
) -> list[HandoverEvent]:
    """Events for every boundary the train front crosses, in time order.

    A boundary b is crossed when start < b <= end. In per-UE mode cell
    boundaries are bursts carrying `n_ues`. A moving cell follows the train,
    so its boundaries and reroute points only move the data stream and carry
    no UEs.
    """
    mode = MobilityMode(mode)
    if n_ues < 0:
        raise InvalidConfigurationError(f"UE count must be >= 0, got {n_ues}")
    if trajectory.speed_mps <= 0 or trajectory.duration_s <= 0:
        return []

    start, end = trajectory.start_m, trajectory.end_m + END_TOLERANCE_M
    if mode == MobilityMode.PER_UE:
        count, kind = n_ues, HandoverKind.PER_UE
    else:
        count, kind = 0, HandoverKind.REROUTE
    crossings = [(b, count, kind) for b in plan.boundaries_m if start < b <= end]
    crossings += [(p, 0, HandoverKind.REROUTE) for p in plan.reroute_points_m if start < p <= end]
    crossings.sort(key=lambda c: c[0])

    events = [
        HandoverEvent((b - start) / trajectory.speed_mps, b, count, kind)
        for b, count, kind in crossings
    ]
    logger.debug(
        f"Trajectory {trajectory.start_m:.1f}->{trajectory.end_m:.1f} m crosses "
        f"{len(events)} points of a {plan.cell_length_m:.0f} m plan"
    )
    return events


def moving_cell_active_ru(
    train_center_m: float, rus: list[RadioUnit], layout: TrackLayout
) -> int:
    """RU carrying the moving cell when the train centre is at `train_center_m`.

    The nearest site (Voronoi span, ties to the lower site) serves through its
    RU facing the train; a centre exactly abeam a site picks the lower RU id.

    Raises:
        CoverageError: If the centre lies outside the first and last sites
    """
    sites = np.asarray(layout.site_positions_m)
    if not sites[0] <= train_center_m <= sites[-1]:
        raise CoverageError(train_center_m, "outside the sites carrying the moving cell")

    site = int(np.argmin(np.abs(sites - train_center_m)))
    along = train_center_m - sites[site]
    candidates = [
        ru for ru in rus if ru.site_index == site and (along == 0 or ru.boresight * along > 0)
    ]
    if not candidates:
        raise CoverageError(train_center_m, f"site {site} has no RU facing the train")
    return min(ru.id for ru in candidates)


def signaling_blocking(events: list[HandoverEvent], model: SignalingModel, window_s: float) -> int:
    """UEs left without a completed handover after each burst's window.

    Per event, completed = min(ue_count, floor(capacity * window)).
    """
    times = [event.time_s for event in events]
    if any(later < earlier for earlier, later in zip(times, times[1:], strict=False)):
        raise ValueError("Handover events must be time-ordered")
    if window_s < 0:
        raise InvalidConfigurationError(f"Window must be >= 0, got {window_s}")
    if math.isinf(window_s):
        return 0

    completed_per_event = math.floor(model.capacity_per_s * window_s + 1e-9)
    return sum(max(0, event.ue_count - completed_per_event) for event in events)


def mobility_report(config: ScenarioConfig) -> list[MobilityRow]:
    """Per-UE and moving-cell rows for the configured mobility run."""
    speed_mps = config.mobility_speed_kmh / 3.6
    trajectory = Trajectory.from_distance(0.0, speed_mps, config.mobility_distance_m)
    signaling = SignalingModel(config.signaling_capacity_per_s)

    plans = {
        MobilityMode.PER_UE: CellPlan.uniform(
            config.conventional_cell_length_m, config.mobility_distance_m
        ),
        MobilityMode.MOVING_CELL: CellPlan.uniform(
            config.moving_cell_length_m,
            config.mobility_distance_m,
            ru_span_m=config.inter_ru_distance_m,
        ),
    }

    rows = []
    for mode, plan in plans.items():
        period = handover_period(plan.cell_length_m, speed_mps)
        events = handover_trace(trajectory, plan, config.passengers, mode)
        per_ue = sum(e.ue_count for e in events if e.kind == HandoverKind.PER_UE)
        blocked = signaling_blocking(events, signaling, period)
        rows.append(
            MobilityRow(mode, plan.cell_length_m, config.mobility_speed_kmh, period, per_ue, blocked)
        )
        logger.info(
            f"Mobility {mode}: period {period:.3f} s, {per_ue} per-UE handovers, {blocked} blocked"
        )
    return rows
