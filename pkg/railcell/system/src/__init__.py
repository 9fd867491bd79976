"""System layer: schemes, scheduling, mobility and the sweep engine."""

from .config import ScenarioConfig, parse_config, parse_config_text, serialize_config
from .engine import (
    DropResult,
    SweepEngine,
    SweepResult,
    confidence_interval,
    derive_seed,
    penetration_sweep,
    run_drop,
    sweep,
)
from .mobility import (
    CellPlan,
    HandoverEvent,
    HandoverKind,
    SignalingModel,
    Trajectory,
    handover_period,
    handover_trace,
    mobility_report,
    moving_cell_active_ru,
    signaling_blocking,
)
from .scheduler import PfState, ScheduleGrid, pf_schedule, update_pf_state
from .schemes import (
    AssociationMap,
    SchemeKind,
    associate,
    expected_next_site_fraction,
    per_ru_load,
    visible_rus,
    wideband_rx_power_dbm,
)

__all__ = [
    "AssociationMap",
    "CellPlan",
    "DropResult",
    "HandoverEvent",
    "HandoverKind",
    "PfState",
    "ScenarioConfig",
    "ScheduleGrid",
    "SchemeKind",
    "SignalingModel",
    "SweepEngine",
    "SweepResult",
    "Trajectory",
    "associate",
    "confidence_interval",
    "derive_seed",
    "expected_next_site_fraction",
    "handover_period",
    "handover_trace",
    "mobility_report",
    "moving_cell_active_ru",
    "parse_config",
    "parse_config_text",
    "penetration_sweep",
    "per_ru_load",
    "pf_schedule",
    "run_drop",
    "serialize_config",
    "signaling_blocking",
    "sweep",
    "update_pf_state",
    "visible_rus",
    "wideband_rx_power_dbm",
]
