"""
railcell - downlink system-level simulation for high-speed trains

Track-side remote units serve the passengers of a train either directly
through the carriage or through a roof relay. The package sweeps the train
position, compares RU collaboration schemes and computes handover signaling
with and without a moving cell.

Usage:
    from railcell import ScenarioConfig, sweep

    result = sweep(ScenarioConfig(drops_per_point=5))
    for point in result.points:
        print(point.scheme, point.position_m, point.mean_mbps)

    # or from the shell
    railcell-sim --scheme all --positions 0:100:1000 --drops 20 --seed 7
"""

from . import radio, system
from .radio import (
    AssociationError,
    ConfigParseError,
    ConfigRangeError,
    CoverageError,
    InvalidConfigurationError,
    SimulationError,
    UnknownConfigKeyError,
)
from .system import ScenarioConfig, SchemeKind, SweepEngine, parse_config, run_drop, sweep

__version__ = "0.1.0"

__all__ = [
    # Submodules
    "radio",
    "system",
    # Core API
    "ScenarioConfig",
    "SchemeKind",
    "SweepEngine",
    "parse_config",
    "run_drop",
    "sweep",
    # Exceptions
    "AssociationError",
    "ConfigParseError",
    "ConfigRangeError",
    "CoverageError",
    "InvalidConfigurationError",
    "SimulationError",
    "UnknownConfigKeyError",
    # Metadata
    "__version__",
]
