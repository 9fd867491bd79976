"""Per-link radio models: geometry, channel and PHY abstraction."""

from .channel import (
    AntennaPattern,
    FadingProcess,
    PathlossParams,
    antenna_gain,
    doppler_hz,
    fading_sample,
    hata_rural_pl,
    macro_gain,
)
from .exceptions import (
    AssociationError,
    ConfigParseError,
    ConfigRangeError,
    CoverageError,
    InvalidConfigurationError,
    SimulationError,
    UnknownConfigKeyError,
)
from .geometry import (
    RadioUnit,
    TrackLayout,
    TrainState,
    UeSet,
    build_radio_units,
    link_geometry,
    place_ues,
    place_ues_evenly,
)
from .phy import (
    Codebook,
    InterferenceMode,
    LinkAbstraction,
    LinkState,
    noise_power_dbm,
    rb_rate,
    select_pmi,
    sinr,
    sinr_grid,
    spectral_efficiency,
)

__all__ = [
    "AntennaPattern",
    "AssociationError",
    "Codebook",
    "ConfigParseError",
    "ConfigRangeError",
    "CoverageError",
    "FadingProcess",
    "InterferenceMode",
    "InvalidConfigurationError",
    "LinkAbstraction",
    "LinkState",
    "PathlossParams",
    "RadioUnit",
    "SimulationError",
    "TrackLayout",
    "TrainState",
    "UeSet",
    "UnknownConfigKeyError",
    "antenna_gain",
    "build_radio_units",
    "doppler_hz",
    "fading_sample",
    "hata_rural_pl",
    "link_geometry",
    "macro_gain",
    "noise_power_dbm",
    "place_ues",
    "place_ues_evenly",
    "rb_rate",
    "select_pmi",
    "sinr",
    "sinr_grid",
    "spectral_efficiency",
]
