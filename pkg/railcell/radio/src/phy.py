"""Rank-1 precoding, per-RB SINR and the truncated-Shannon link abstraction."""

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from .exceptions import AssociationError, InvalidConfigurationError
from .geometry import RadioUnit

logger = logging.getLogger(__name__)


class InterferenceMode(StrEnum):
    """How the precoder of an interfering RU is accounted for."""

    EXPECTED = "expected"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class Codebook:
    """Rank-1 precoders for two transmit antennas."""

    vectors: np.ndarray = field(
        default_factory=lambda: np.array([[1, 1], [1, -1], [1, 1j], [1, -1j]]) / math.sqrt(2.0),
        repr=False,
    )

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=complex)
        if not np.allclose(np.linalg.norm(vectors, axis=1), 1.0):
            raise InvalidConfigurationError("Codebook vectors must have unit norm")
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def for_antennas(cls, n_tx: int) -> "Codebook":
        """Rank-1 codebook for `n_tx` transmit antennas (1 or 2)."""
        if n_tx == 1:
            return cls(np.ones((1, 1)))
        if n_tx == 2:
            return cls()
        raise InvalidConfigurationError(f"No rank-1 codebook for {n_tx} transmit antennas")


@dataclass(frozen=True)
class LinkAbstraction:
    """Bandwidth-efficiency-scaled, capped Shannon mapping over an RB grid."""

    alpha: float = 0.6
    se_max: float = 4.4
    rb_bandwidth_hz: float = 180e3
    n_rb: int = 100
    system_bandwidth_hz: float = 20e6

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise InvalidConfigurationError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.se_max <= 0:
            raise InvalidConfigurationError(f"se_max must be positive, got {self.se_max}")
        if self.n_rb < 1 or self.rb_bandwidth_hz <= 0:
            raise InvalidConfigurationError("RB grid must be non-empty with positive RB width")
        if self.n_rb * self.rb_bandwidth_hz > self.system_bandwidth_hz + 1e-6:
            raise InvalidConfigurationError(
                "RB grid exceeds the system bandwidth",
                {"n_rb": self.n_rb, "rb_bandwidth_hz": self.rb_bandwidth_hz},
            )


@dataclass(frozen=True)
class LinkState:
    """Macroscopic gain and per-RB fading of one (UE, RU) link."""

    macro_gain_db: float
    fading: np.ndarray  # (n_rb, n_tx)


def noise_power_dbm(psd_dbm_hz: float, bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise plus receiver noise figure over `bandwidth_hz`."""
    if bandwidth_hz <= 0:
        raise InvalidConfigurationError(f"Bandwidth must be positive, got {bandwidth_hz}")
    return psd_dbm_hz + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def dbm_to_mw(value_dbm):
    return 10.0 ** (np.asarray(value_dbm) / 10.0)


def watts_to_dbm(power_w: float) -> float:
    return 10.0 * math.log10(power_w * 1000.0)


def select_pmi(h: np.ndarray, cb: Codebook | None = None) -> tuple[np.ndarray, float]:
    """Pick the codeword maximising |h . w|^2; ties go to the lowest index."""
    cb = cb or Codebook()
    gains = np.abs(cb.vectors @ np.asarray(h, dtype=complex)) ** 2
    index = int(np.argmax(gains))
    return cb.vectors[index], float(gains[index])


def precoding_gains(h: np.ndarray, cb: Codebook) -> np.ndarray:
    """Best-codeword gain for an array of channels shaped (..., n_tx)."""
    return np.max(np.abs(h @ cb.vectors.T) ** 2, axis=-1)


def interference_factor(
    h: np.ndarray,
    cb: Codebook,
    mode: InterferenceMode = InterferenceMode.EXPECTED,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Power factor of an interfering RU whose precoder ignores this UE."""
    if mode == InterferenceMode.EXPECTED:
        return np.sum(np.abs(h) ** 2, axis=-1) / h.shape[-1]
    if rng is None:
        raise ValueError("Sampled interference needs a random generator")
    picks = rng.integers(0, len(cb), size=h.shape[:-1])
    return np.abs(np.sum(h * cb.vectors[picks], axis=-1)) ** 2


def sinr(
    ue: int,
    rb: int,
    serving_set: list[RadioUnit],
    interferer_set: list[RadioUnit],
    links: dict[tuple[int, int], LinkState],
    noise_mw_per_rb: float,
    n_rb: int = 100,
    cb: Codebook | None = None,
) -> float:
    """Linear SINR of `ue` on `rb`.

    Serving RUs add non-coherently, each with its own best codeword.
    Interferers contribute their expected power under an uninformed precoder.

    Raises:
        AssociationError: If the serving set is empty or overlaps the interferers
    """
    if not serving_set:
        raise AssociationError(ue, "empty serving set")
    overlap = {ru.id for ru in serving_set} & {ru.id for ru in interferer_set}
    if overlap:
        raise AssociationError(ue, "serving and interferer sets overlap", {"rus": sorted(overlap)})

    cb = cb or Codebook()
    signal = 0.0
    for ru in serving_set:
        link = links[(ue, ru.id)]
        _, gain = select_pmi(link.fading[rb], cb)
        signal += ru.tx_power_w * 1000.0 / n_rb * 10.0 ** (link.macro_gain_db / 10.0) * gain

    interference = 0.0
    for ru in interferer_set:
        link = links[(ue, ru.id)]
        factor = float(np.sum(np.abs(link.fading[rb]) ** 2)) / link.fading.shape[-1]
        interference += ru.tx_power_w * 1000.0 / n_rb * 10.0 ** (link.macro_gain_db / 10.0) * factor

    return signal / (noise_mw_per_rb + interference)


def sinr_grid(
    rx_power_mw: np.ndarray,
    fading: np.ndarray,
    serving_mask: np.ndarray,
    interferer_mask: np.ndarray,
    noise_mw_per_rb: float,
    cb: Codebook,
    mode: InterferenceMode = InterferenceMode.EXPECTED,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Per (UE, RB) SINR for one TTI.

    Args:
        rx_power_mw: Per-RB received power before fading, shaped (n_ue, n_ru)
        fading: Per-RB channel vectors, shaped (n_ue, n_ru, n_rb, n_tx)
        serving_mask: True where the RU serves the UE, shaped (n_ue, n_ru)
        interferer_mask: True where the RU interferes with the UE
        noise_mw_per_rb: Noise power per RB in mW
        cb: Precoding codebook
        mode: Interference accounting mode
        rng: Generator for the sampled interference mode

    Returns:
        SINR array shaped (n_ue, n_rb)
    """
    signal = np.einsum(
        "ur,urb->ub", rx_power_mw * serving_mask, precoding_gains(fading, cb)
    )
    interference = np.einsum(
        "ur,urb->ub",
        rx_power_mw * interferer_mask,
        interference_factor(fading, cb, mode, rng),
    )
    return signal / (noise_mw_per_rb + interference)


def spectral_efficiency(sinr_linear, la: LinkAbstraction):
    """min(alpha * log2(1 + SINR), se_max) in bit/s/Hz."""
    se = np.minimum(la.alpha * np.log2(1.0 + np.asarray(sinr_linear, dtype=float)), la.se_max)
    return float(se) if np.ndim(se) == 0 else se


def rb_rate(se, la: LinkAbstraction):
    """Bit rate carried by one RB at spectral efficiency `se`."""
    rate = np.asarray(se, dtype=float) * la.rb_bandwidth_hz
    return float(rate) if np.ndim(rate) == 0 else rate
