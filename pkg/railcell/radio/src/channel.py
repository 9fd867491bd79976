"""Macroscopic link gain and time-correlated small-scale fading."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from .exceptions import InvalidConfigurationError
from .geometry import RadioUnit, TrackLayout, link_geometry

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT_MPS = 2.99792458e8

# ITU-R Vehicular A power delay profile
VEHICULAR_A_DELAYS_NS = (0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0)
VEHICULAR_A_POWERS_DB = (0.0, -1.0, -9.0, -10.0, -15.0, -20.0)

# scattered paths summed per tap gain
FADING_SINUSOIDS = 16

HATA_MAX_CARRIER_MHZ = 2000.0


@dataclass(frozen=True)
class PathlossParams:
    """Parameters of the rural macro-cell Hata model."""

    carrier_mhz: float = 2140.0
    bs_height_m: float = 30.0
    min_distance_m: float = 35.0

    def __post_init__(self):
        if self.carrier_mhz < 150.0:
            raise InvalidConfigurationError(
                f"Carrier {self.carrier_mhz} MHz is below the Hata range (150 MHz)"
            )
        if self.carrier_mhz > HATA_MAX_CARRIER_MHZ:
            logger.info(
                f"Carrier {self.carrier_mhz} MHz is above the classical Hata range; "
                "applying the rural formula as for LTE bands"
            )
        if not 30.0 <= self.bs_height_m <= 200.0:
            raise InvalidConfigurationError(
                f"Base station height must be in [30, 200] m, got {self.bs_height_m}"
            )
        if self.min_distance_m <= 0:
            raise InvalidConfigurationError(
                f"Minimum distance must be positive, got {self.min_distance_m}"
            )


@dataclass(frozen=True)
class AntennaPattern:
    """Parabolic horizontal sector pattern."""

    theta_3db_deg: float = 65.0
    front_to_back_db: float = 20.0

    def __post_init__(self):
        if self.theta_3db_deg <= 0 or self.front_to_back_db <= 0:
            raise InvalidConfigurationError(
                "Antenna beamwidth and front-to-back ratio must be positive",
                {"theta_3db_deg": self.theta_3db_deg, "front_to_back_db": self.front_to_back_db},
            )


def hata_rural_pl(distance_m, p: PathlossParams):
    """Rural Hata path loss in dB; distances below the floor are clamped.

    Accepts a scalar or an array of distances.
    """
    d_km = np.maximum(distance_m, p.min_distance_m) / 1000.0
    log_f = math.log10(p.carrier_mhz)
    log_hb = math.log10(p.bs_height_m)
    loss = (
        69.55
        + 26.16 * log_f
        - 13.82 * log_hb
        + (44.9 - 6.55 * log_hb) * np.log10(d_km)
        - 4.78 * log_f**2
        + 18.33 * log_f
        - 40.94
    )
    return float(loss) if np.ndim(loss) == 0 else loss


def antenna_gain(theta_deg, pat: AntennaPattern):
    """Horizontal antenna gain in dB (0 on boresight, -A_m at worst)."""
    gain = -np.minimum(12.0 * (np.asarray(theta_deg) / pat.theta_3db_deg) ** 2, pat.front_to_back_db)
    return float(gain) if np.ndim(gain) == 0 else gain


def doppler_hz(speed_mps: float, carrier_hz: float) -> float:
    """Maximum Doppler shift for a receiver moving at `speed_mps`."""
    if speed_mps < 0:
        raise InvalidConfigurationError(f"Speed must be >= 0, got {speed_mps}")
    return speed_mps * carrier_hz / SPEED_OF_LIGHT_MPS


def macro_gain(
    ue_pos: float,
    ru: RadioUnit,
    layout: TrackLayout,
    p: PathlossParams,
    pat: AntennaPattern,
    penetration_db: float,
) -> float:
    """Path loss, antenna gain and penetration loss combined (negative = loss)."""
    distance, angle = link_geometry(ue_pos, ru, layout)
    return -hata_rural_pl(distance, p) + antenna_gain(angle, pat) - penetration_db


def macro_gain_matrix(distances, angles, p: PathlossParams, pat: AntennaPattern, penetration_db: float):
    """Vectorised `macro_gain` over precomputed link geometry."""
    return -hata_rural_pl(distances, p) + antenna_gain(angles, pat) - penetration_db


def rb_center_offsets_hz(n_rb: int, rb_bandwidth_hz: float) -> np.ndarray:
    """RB centre frequencies relative to the carrier."""
    return (np.arange(n_rb) - (n_rb - 1) / 2.0) * rb_bandwidth_hz


class FadingProcess:
    """Tapped-delay-line Rayleigh fading for a batch of links.

    Every (link, tx antenna, tap) gain is a sum of `n_sinusoids` unit phasors
    with random arrival angles and phases, each rotating at the Doppler shift
    of its angle. Over the ensemble the correlation at any lag t is
    J0(2 pi f_d t). The flat coefficient of an RB sums the taps with the phase
    rotation of the RB centre frequency. The random angles and phases are all
    drawn from `rng` at construction; afterwards the process is deterministic
    in the TTI index.
    """

    def __init__(
        self,
        n_links: int,
        n_tx: int,
        doppler_hz: float,
        tti_s: float,
        rb_offsets_hz: np.ndarray,
        rng: np.random.Generator,
        tap_delays_ns: tuple[float, ...] = VEHICULAR_A_DELAYS_NS,
        tap_powers_db: tuple[float, ...] = VEHICULAR_A_POWERS_DB,
        n_sinusoids: int = FADING_SINUSOIDS,
    ):
        """Initialize the fading state.

        Args:
            n_links: Number of (UE, RU) links simulated together
            n_tx: Transmit antennas per RU
            doppler_hz: Maximum Doppler shift
            tti_s: Time step between consecutive TTIs
            rb_offsets_hz: RB centre frequencies relative to the carrier
            rng: Generator the angles and phases are drawn from
            tap_delays_ns: Tap delays of the power delay profile
            tap_powers_db: Tap powers, normalised to unit total power here
            n_sinusoids: Scattered paths summed per tap gain
        """
        if len(tap_delays_ns) != len(tap_powers_db):
            raise InvalidConfigurationError("Tap delays and powers must have equal length")
        if n_sinusoids < 1:
            raise InvalidConfigurationError(f"Need at least one sinusoid per tap, got {n_sinusoids}")

        powers = 10.0 ** (np.asarray(tap_powers_db, dtype=float) / 10.0)
        self.tap_powers = powers / powers.sum()
        self.tap_delays_s = np.asarray(tap_delays_ns, dtype=float) * 1e-9
        self.doppler_hz = doppler_hz
        self.tti_s = tti_s
        # lag-one correlation of every tap gain
        self.rho = float(j0(2.0 * math.pi * doppler_hz * tti_s))
        self.tti_index = 0

        # (n_taps, n_rb)
        self._steering = np.sqrt(self.tap_powers)[:, None] * np.exp(
            -2j * math.pi * self.tap_delays_s[:, None] * np.asarray(rb_offsets_hz)[None, :]
        )
        paths = (n_links, n_tx, len(self.tap_powers), n_sinusoids)
        arrival = rng.uniform(0.0, 2.0 * math.pi, paths)
        self._omega = 2.0 * math.pi * doppler_hz * np.cos(arrival)
        self._phase = rng.uniform(0.0, 2.0 * math.pi, paths)

    @property
    def shape(self) -> tuple[int, int, int]:
        n_links, n_tx, _, _ = self._phase.shape
        return n_links, n_tx, self._steering.shape[1]

    def advance(self, steps: int = 1) -> None:
        """Move the process `steps` TTIs forward."""
        if steps <= 0:
            return
        self.tti_index += steps

    def tap_gains(self) -> np.ndarray:
        """Unit-power tap gains at the current TTI, shaped (n_links, n_tx, n_taps)."""
        t = self.tti_index * self.tti_s
        phasors = np.exp(1j * (self._omega * t + self._phase))
        return phasors.sum(axis=-1) / math.sqrt(self._phase.shape[-1])

    def coefficients(self) -> np.ndarray:
        """Per-RB flat coefficients at the current TTI, shaped (n_links, n_rb, n_tx)."""
        return np.einsum("ltk,kb->lbt", self.tap_gains(), self._steering)


def fading_sample(process: FadingProcess, tti_index: int, rb_index: int) -> np.ndarray:
    """Coefficient per tx antenna of every link on one RB at `tti_index`.

    The process only moves forward; requesting an earlier TTI is an error.

    Returns:
        Array shaped (n_links, n_tx)
    """
    if tti_index < process.tti_index:
        raise ValueError(
            f"Fading process is at TTI {process.tti_index}, cannot rewind to {tti_index}"
        )
    process.advance(tti_index - process.tti_index)
    return process.coefficients()[:, rb_index, :]
