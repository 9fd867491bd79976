"""Scenario configuration: defaults, key=value parsing and serialization."""

import logging
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from ...radio.src.exceptions import (
    ConfigParseError,
    ConfigRangeError,
    InvalidConfigurationError,
    UnknownConfigKeyError,
)

logger = logging.getLogger(__name__)

SCHEME_CHOICES = ("baseline", "coordination", "cooperation", "relay", "all")
INTERFERENCE_CHOICES = ("expected", "sampled")

# key -> type, unit, allowed range, description
CONFIG_FIELDS = {
    "bandwidth_mhz": {"type": "float", "unit": "MHz", "range": (0, None), "description": "System bandwidth"},
    "n_rb": {"type": "int", "unit": "", "range": (1, None), "description": "Resource blocks per TTI"},
    "rb_bandwidth_khz": {"type": "float", "unit": "kHz", "range": (0, None), "description": "Resource block width"},
    "carrier_mhz": {"type": "float", "unit": "MHz", "range": (150, None), "description": "Carrier frequency"},
    "n_sites": {"type": "int", "unit": "", "range": (2, None), "description": "Number of track-side sites"},
    "inter_ru_distance_m": {"type": "float", "unit": "m", "range": (0, None), "description": "Distance between adjacent sites"},
    "site_lateral_offset_m": {"type": "float", "unit": "m", "range": (0, None), "inclusive_low": True, "description": "Perpendicular site distance from the track"},
    "ru_height_m": {"type": "float", "unit": "m", "range": (30, 200), "inclusive_low": True, "inclusive_high": True, "description": "RU antenna height (Hata validity)"},
    "ue_height_m": {"type": "float", "unit": "m", "range": (0, None), "description": "UE antenna height"},
    "relay_height_m": {"type": "float", "unit": "m", "range": (0, None), "description": "Roof antenna height in relay mode"},
    "tx_power_w": {"type": "float", "unit": "W", "range": (0, None), "description": "Transmit power per RU"},
    "n_tx_antennas": {"type": "int", "unit": "", "range": (1, 2), "inclusive_low": True, "description": "Transmit antennas per RU"},
    "min_distance_m": {"type": "float", "unit": "m", "range": (0, None), "description": "Path loss distance floor"},
    "theta_3db_deg": {"type": "float", "unit": "deg", "range": (0, 180), "description": "Antenna 3 dB beamwidth"},
    "front_to_back_db": {"type": "float", "unit": "dB", "range": (0, None), "description": "Maximum antenna attenuation"},
    "penetration_db": {"type": "float", "unit": "dB", "range": (0, None), "inclusive_low": True, "description": "Carriage penetration loss"},
    "noise_psd_dbm_hz": {"type": "float", "unit": "dBm/Hz", "range": (None, None), "description": "Noise power spectral density"},
    "noise_figure_db": {"type": "float", "unit": "dB", "range": (0, None), "inclusive_low": True, "description": "Receiver noise figure"},
    "train_length_m": {"type": "float", "unit": "m", "range": (0, None), "description": "Train length"},
    "train_speed_kmh": {"type": "float", "unit": "km/h", "range": (0, None), "inclusive_low": True, "description": "Train speed (drives Doppler)"},
    "passengers": {"type": "int", "unit": "", "range": (1, None), "description": "Passengers aboard"},
    "active_fraction": {"type": "float", "unit": "", "range": (0, 1), "inclusive_high": True, "description": "Share of passengers with an active connection"},
    "alpha": {"type": "float", "unit": "", "range": (0, 1), "inclusive_high": True, "description": "Bandwidth efficiency of the Shannon mapping"},
    "se_max": {"type": "float", "unit": "bit/s/Hz", "range": (0, None), "description": "Spectral efficiency cap"},
    "pf_beta": {"type": "float", "unit": "", "range": (0, 1), "inclusive_high": True, "description": "PF forgetting factor"},
    "pf_epsilon_bps": {"type": "float", "unit": "bit/s", "range": (0, None), "description": "PF cold-start throughput"},
    "tti_ms": {"type": "float", "unit": "ms", "range": (0, None), "description": "Transmission time interval"},
    "interference_mode": {"type": "choice", "choices": INTERFERENCE_CHOICES, "description": "Interferer precoder accounting"},
    "drops_per_point": {"type": "int", "unit": "", "range": (2, None), "description": "Drops per (scheme, position)"},
    "ttis_per_drop": {"type": "int", "unit": "", "range": (1, None), "description": "TTIs simulated per drop"},
    "positions_m": {"type": "positions", "unit": "m", "description": "Relative train-centre positions START:STEP:STOP or a comma list"},
    "scheme": {"type": "choice", "choices": SCHEME_CHOICES, "description": "Collaboration scheme"},
    "master_seed": {"type": "int", "unit": "", "range": (0, None), "inclusive_low": True, "description": "Seed of the whole sweep"},
    "workers": {"type": "int", "unit": "", "range": (1, None), "description": "Parallel drop workers"},
    "mobility_speed_kmh": {"type": "float", "unit": "km/h", "range": (0, None), "inclusive_low": True, "description": "Train speed for the mobility report"},
    "mobility_distance_m": {"type": "float", "unit": "m", "range": (0, None), "inclusive_low": True, "description": "Trajectory length for the mobility report"},
    "conventional_cell_length_m": {"type": "float", "unit": "m", "range": (0, None), "description": "Cell length without moving cell"},
    "moving_cell_length_m": {"type": "float", "unit": "m", "range": (0, 50000), "inclusive_high": True, "description": "Moving-cell length"},
    "signaling_capacity_per_s": {"type": "float", "unit": "handovers/s", "range": (0, None), "description": "Control channel handover capacity"},
}


def _default_positions() -> tuple[float, ...]:
    return tuple(float(x) for x in range(0, 1001, 100))


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete parameter set of a simulation run."""

    bandwidth_mhz: float = 20.0
    n_rb: int = 100
    rb_bandwidth_khz: float = 180.0
    carrier_mhz: float = 2140.0
    n_sites: int = 4
    inter_ru_distance_m: float = 1000.0
    site_lateral_offset_m: float = 5.0
    ru_height_m: float = 30.0
    ue_height_m: float = 1.5
    relay_height_m: float = 4.0
    tx_power_w: float = 40.0
    n_tx_antennas: int = 2
    min_distance_m: float = 35.0
    theta_3db_deg: float = 65.0
    front_to_back_db: float = 20.0
    penetration_db: float = 30.0
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    train_length_m: float = 200.84
    train_speed_kmh: float = 200.0
    passengers: int = 460
    active_fraction: float = 0.1
    alpha: float = 0.6
    se_max: float = 4.4
    pf_beta: float = 0.001
    pf_epsilon_bps: float = 1.0
    tti_ms: float = 1.0
    interference_mode: str = "expected"
    drops_per_point: int = 20
    ttis_per_drop: int = 200
    positions_m: tuple[float, ...] = _default_positions()
    scheme: str = "all"
    master_seed: int = 1
    workers: int = 1
    mobility_speed_kmh: float = 350.0
    mobility_distance_m: float = 10000.0
    conventional_cell_length_m: float = 1000.0
    moving_cell_length_m: float = 50000.0
    signaling_capacity_per_s: float = 100.0

    def __post_init__(self):
        for name, spec in CONFIG_FIELDS.items():
            _check_range(name, getattr(self, name), spec)
        for position in self.positions_m:
            if not 0.0 <= position <= self.inter_ru_distance_m:
                raise ConfigRangeError(
                    "positions_m", position, f"[0, {self.inter_ru_distance_m}] (one RU span)"
                )
        if self.n_rb * self.rb_bandwidth_khz > self.bandwidth_mhz * 1000.0 + 1e-6:
            raise ConfigRangeError(
                "n_rb", self.n_rb, f"n_rb * rb_bandwidth_khz <= {self.bandwidth_mhz * 1000.0} kHz"
            )

    @property
    def n_active_ues(self) -> int:
        """floor(passengers * active_fraction), at least one."""
        return max(1, math.floor(self.passengers * self.active_fraction + 1e-9))

    @property
    def train_speed_mps(self) -> float:
        return self.train_speed_kmh / 3.6

    @property
    def tti_s(self) -> float:
        return self.tti_ms / 1000.0

    @property
    def span_start_m(self) -> float:
        """Absolute coordinate of relative position 0 (the second site)."""
        return self.inter_ru_distance_m

    def with_overrides(self, **overrides) -> "ScenarioConfig":
        return replace(self, **overrides)


def _check_range(name: str, value, spec: dict, line_number: int | None = None) -> None:
    if spec["type"] == "choice":
        if value not in spec["choices"]:
            raise ConfigRangeError(name, value, f"one of {list(spec['choices'])}", line_number)
        return
    if spec["type"] == "positions":
        if not value:
            raise ConfigRangeError(name, value, "at least one position", line_number)
        return

    low, high = spec.get("range", (None, None))
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigRangeError(name, value, "a finite number", line_number)
    if low is not None:
        ok = value >= low if spec.get("inclusive_low", spec["type"] == "int") else value > low
        if not ok:
            raise ConfigRangeError(name, value, _describe_range(spec), line_number)
    if high is not None:
        ok = value <= high if spec.get("inclusive_high", spec["type"] == "int") else value < high
        if not ok:
            raise ConfigRangeError(name, value, _describe_range(spec), line_number)


def _describe_range(spec: dict) -> str:
    low, high = spec["range"]
    inclusive_low = spec.get("inclusive_low", spec["type"] == "int")
    inclusive_high = spec.get("inclusive_high", spec["type"] == "int")
    left = "-inf" if low is None else f"{low}"
    right = "inf" if high is None else f"{high}"
    return f"{'[' if inclusive_low and low is not None else '('}{left}, {right}{']' if inclusive_high and high is not None else ')'}"


def parse_positions(text: str) -> tuple[float, ...]:
    """Parse `START:STEP:STOP` (stop inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected START:STEP:STOP, got '{text}'")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("STEP must be positive")
        if stop < start:
            raise ValueError("STOP must not be below START")
        count = math.floor((stop - start) / step + 1e-9) + 1
        return tuple(round(start + i * step, 9) for i in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())


def format_positions(positions: tuple[float, ...]) -> str:
    return ",".join(f"{p:.10g}" for p in positions)


def _convert(key: str, raw: str, line_number: int):
    spec = CONFIG_FIELDS[key]
    try:
        if spec["type"] == "int":
            return int(raw)
        if spec["type"] == "float":
            return float(raw)
        if spec["type"] == "positions":
            return parse_positions(raw)
        return raw.strip().lower()
    except ValueError as e:
        raise ConfigParseError(key, line_number, f"cannot read '{raw}' as {spec['type']}: {e}") from e


def parse_config_text(text: str) -> ScenarioConfig:
    """Parse key=value config text into a ScenarioConfig.

    Args:
        text: Config text; '#' starts a comment, blank lines are ignored

    Returns:
        ScenarioConfig with defaults for every missing key

    Raises:
        ConfigParseError: Malformed line or value
        UnknownConfigKeyError: Key not in CONFIG_FIELDS
        ConfigRangeError: Value out of range
    """
    values = {}
    line_numbers = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(None, line_number, f"expected key=value, got '{line}'")

        key, raw_value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_FIELDS:
            raise UnknownConfigKeyError(key, line_number, list(CONFIG_FIELDS))
        if not raw_value:
            raise ConfigParseError(key, line_number, "missing value")

        value = _convert(key, raw_value, line_number)
        _check_range(key, value, CONFIG_FIELDS[key], line_number)
        values[key] = value
        line_numbers[key] = line_number

    try:
        return ScenarioConfig(**values)
    except ConfigRangeError as e:
        # cross-field checks: point at the offending line when there is one
        if e.key in line_numbers and e.line_number is None:
            raise ConfigRangeError(e.key, e.details["value"], e.details["allowed"], line_numbers[e.key]) from e
        raise


def parse_config(path: str | Path) -> ScenarioConfig:
    """Read a UTF-8 key=value config file.

    Raises:
        InvalidConfigurationError: File cannot be read
        ConfigParseError: Bytes that are not UTF-8, reported with their line
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise InvalidConfigurationError(f"Cannot read config file {path}: {e}") from e
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line_number = data[: e.start].count(b"\n") + 1
        raise ConfigParseError(None, line_number, f"invalid UTF-8 byte at offset {e.start}") from e
    config = parse_config_text(text)
    logger.info(f"Loaded config from {path}")
    return config


def serialize_config(config: ScenarioConfig) -> str:
    """Render every key in table order; parses back to an equal config."""
    lines = []
    for item in fields(config):
        value = getattr(config, item.name)
        spec = CONFIG_FIELDS[item.name]
        if spec["type"] == "positions":
            rendered = format_positions(value)
        elif spec["type"] == "float":
            rendered = repr(float(value))
        else:
            rendered = str(value)
        lines.append(f"{item.name}={rendered}")
    return "\n".join(lines) + "\n"
