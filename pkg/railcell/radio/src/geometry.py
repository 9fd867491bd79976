"""Track, radio unit, train and UE geometry on a straight 1-D railway."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidConfigurationError

logger = logging.getLogger(__name__)

FORWARD = 1
BACKWARD = -1


@dataclass(frozen=True)
class TrackLayout:
    """Sites along the track plus the fixed lateral/vertical offsets."""

    site_positions_m: tuple[float, ...]
    site_lateral_offset_m: float = 5.0
    ru_height_m: float = 30.0
    ue_height_m: float = 1.5

    def __post_init__(self):
        positions = tuple(float(p) for p in self.site_positions_m)
        object.__setattr__(self, "site_positions_m", positions)

        if not positions:
            raise InvalidConfigurationError("Track layout needs at least one site")
        steps = np.diff(positions)
        if np.any(steps <= 0):
            raise InvalidConfigurationError(
                "Site positions must be strictly increasing",
                {"site_positions_m": positions},
            )
        if steps.size and not np.allclose(steps, steps[0]):
            raise InvalidConfigurationError(
                "Sites must be equidistant", {"site_positions_m": positions}
            )
        if self.site_lateral_offset_m < 0:
            raise InvalidConfigurationError(
                f"Lateral offset must be >= 0, got {self.site_lateral_offset_m}"
            )
        if self.ru_height_m <= 0 or self.ue_height_m <= 0:
            raise InvalidConfigurationError(
                "Antenna heights must be positive",
                {"ru_height_m": self.ru_height_m, "ue_height_m": self.ue_height_m},
            )

    @classmethod
    def equidistant(
        cls,
        n_sites: int,
        inter_ru_distance_m: float,
        site_lateral_offset_m: float = 5.0,
        ru_height_m: float = 30.0,
        ue_height_m: float = 1.5,
    ) -> "TrackLayout":
        """Build `n_sites` sites starting at 0 m, `inter_ru_distance_m` apart."""
        if n_sites < 1 or inter_ru_distance_m <= 0:
            raise InvalidConfigurationError(
                "Need n_sites >= 1 and a positive inter-RU distance",
                {"n_sites": n_sites, "inter_ru_distance_m": inter_ru_distance_m},
            )
        positions = tuple(i * float(inter_ru_distance_m) for i in range(n_sites))
        return cls(positions, site_lateral_offset_m, ru_height_m, ue_height_m)

    @property
    def inter_site_distance_m(self) -> float:
        if len(self.site_positions_m) < 2:
            return 0.0
        return self.site_positions_m[1] - self.site_positions_m[0]

    def mirrored(self, about_m: float) -> "TrackLayout":
        """Return the layout reflected about the track coordinate `about_m`."""
        positions = tuple(sorted(2.0 * about_m - p for p in self.site_positions_m))
        return TrackLayout(
            positions, self.site_lateral_offset_m, self.ru_height_m, self.ue_height_m
        )


@dataclass(frozen=True)
class RadioUnit:
    """A track-side remote unit radiating along the track."""

    id: int
    site_index: int
    boresight: int
    tx_power_w: float = 40.0
    n_tx_antennas: int = 2

    def __post_init__(self):
        if self.boresight not in (FORWARD, BACKWARD):
            raise InvalidConfigurationError(
                f"RU {self.id} boresight must be +1 or -1, got {self.boresight}"
            )
        if self.tx_power_w <= 0:
            raise InvalidConfigurationError(
                f"RU {self.id} transmit power must be positive, got {self.tx_power_w}"
            )
        if self.n_tx_antennas < 1:
            raise InvalidConfigurationError(
                f"RU {self.id} needs at least one antenna"
            )

    def position_m(self, layout: TrackLayout) -> float:
        return layout.site_positions_m[self.site_index]


def build_radio_units(
    layout: TrackLayout, tx_power_w: float = 40.0, n_tx_antennas: int = 2
) -> list[RadioUnit]:
    """Create two back-to-back RUs per site.

    Site ``i`` owns RU ``2i`` pointing backward and RU ``2i + 1`` pointing forward.
    """
    rus = []
    for site_index in range(len(layout.site_positions_m)):
        rus.append(RadioUnit(2 * site_index, site_index, BACKWARD, tx_power_w, n_tx_antennas))
        rus.append(RadioUnit(2 * site_index + 1, site_index, FORWARD, tx_power_w, n_tx_antennas))
    return rus


@dataclass(frozen=True)
class TrainState:
    """Train length, speed and the track coordinate of its centre."""

    length_m: float = 200.84
    speed_mps: float = 200.0 / 3.6
    center_m: float = 0.0

    def __post_init__(self):
        if self.length_m <= 0:
            raise InvalidConfigurationError(f"Train length must be positive, got {self.length_m}")
        if self.speed_mps < 0:
            raise InvalidConfigurationError(f"Train speed must be >= 0, got {self.speed_mps}")

    @property
    def front_m(self) -> float:
        return self.center_m + self.length_m / 2.0

    @property
    def rear_m(self) -> float:
        return self.center_m - self.length_m / 2.0


@dataclass(frozen=True)
class UeSet:
    """UE positions measured from the rear of the train."""

    offsets_m: np.ndarray = field(repr=False)

    def __post_init__(self):
        offsets = np.asarray(self.offsets_m, dtype=float)
        offsets.setflags(write=False)
        object.__setattr__(self, "offsets_m", offsets)

    @property
    def count(self) -> int:
        return int(self.offsets_m.size)

    def validate(self, train_length_m: float) -> None:
        """Reject offsets before the rear or past the front of the train."""
        if np.any(self.offsets_m < 0) or np.any(self.offsets_m > train_length_m):
            raise InvalidConfigurationError(
                "UE offsets must lie inside the train",
                {"train_length_m": train_length_m},
            )


def place_ues(count: int, train_length_m: float, rng: np.random.Generator) -> UeSet:
    """Drop `count` UEs uniformly at random along the train.

    Args:
        count: Number of active UEs (>= 1)
        train_length_m: Train length in meters (> 0)
        rng: Seeded generator; the same seed yields the same placement

    Returns:
        UeSet with i.i.d. uniform offsets in [0, train_length_m]

    Raises:
        InvalidConfigurationError: If count < 1 or the length is not positive
    """
    if count < 1 or train_length_m <= 0:
        raise InvalidConfigurationError(
            "UE placement needs count >= 1 and a positive train length",
            {"count": count, "train_length_m": train_length_m},
        )
    return UeSet(rng.uniform(0.0, train_length_m, size=count))


def place_ues_evenly(count: int, train_length_m: float) -> UeSet:
    """Deterministic uniform placement at the centres of `count` equal slices."""
    if count < 1 or train_length_m <= 0:
        raise InvalidConfigurationError(
            "UE placement needs count >= 1 and a positive train length",
            {"count": count, "train_length_m": train_length_m},
        )
    return UeSet((np.arange(count) + 0.5) * train_length_m / count)


def ue_track_positions(train: TrainState, ues: UeSet) -> np.ndarray:
    """Track coordinates of every UE, in UE order.

    Raises:
        InvalidConfigurationError: If some offset lies outside `train`
    """
    ues.validate(train.length_m)
    return train.rear_m + ues.offsets_m


def link_geometry(ue_pos: float, ru: RadioUnit, layout: TrackLayout) -> tuple[float, float]:
    """3-D distance and horizontal boresight angle from an RU to a UE.

    Returns:
        (distance_3d_m, boresight_angle_deg) with the angle in [0, 180]
    """
    distances, angles = link_geometry_matrix(np.array([ue_pos]), [ru], layout)
    return float(distances[0, 0]), float(angles[0, 0])


def link_geometry_matrix(
    ue_positions: np.ndarray, rus: list[RadioUnit], layout: TrackLayout
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised `link_geometry` for every (UE, RU) pair.

    Returns:
        (distances, angles), each shaped (n_ues, n_rus)
    """
    ue_positions = np.asarray(ue_positions, dtype=float)
    ru_positions = np.array([ru.position_m(layout) for ru in rus])
    boresights = np.array([ru.boresight for ru in rus], dtype=float)

    along = ue_positions[:, None] - ru_positions[None, :]
    lateral = layout.site_lateral_offset_m
    vertical = layout.ru_height_m - layout.ue_height_m

    distances = np.sqrt(along**2 + lateral**2 + vertical**2)
    # lateral >= 0 keeps arctan2 in [0, pi]
    angles = np.degrees(np.arctan2(np.full_like(along, lateral), boresights * along))
    if lateral == 0:
        angles = np.where(along == 0, 90.0, angles)
    return distances, angles
