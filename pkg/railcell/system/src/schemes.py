"""UE association and the RU collaboration schemes."""

import logging
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from ...radio.src.channel import AntennaPattern, PathlossParams, macro_gain, macro_gain_matrix
from ...radio.src.exceptions import AssociationError, CoverageError
from ...radio.src.geometry import (
    RadioUnit,
    TrackLayout,
    TrainState,
    link_geometry,
    link_geometry_matrix,
)
from ...radio.src.phy import watts_to_dbm

logger = logging.getLogger(__name__)

MAX_VISIBLE_ANGLE_DEG = 90.0
ANGLE_TOLERANCE_DEG = 1e-9
RELAY_PENETRATION_DB = 0.0


class SchemeKind(StrEnum):
    """RU collaboration scheme of a run."""

    BASELINE = "baseline"
    COORDINATION = "coordination"
    COOPERATION = "cooperation"
    RELAY = "relay"


@dataclass(frozen=True)
class Cell:
    """A scheduling domain: one RU, or a merged group sharing one RB grid."""

    cell_id: int
    ru_ids: tuple[int, ...]
    ue_ids: tuple[int, ...]


@dataclass(frozen=True)
class LinkBudget:
    """Geometry and wideband receive power of every (UE, RU) pair."""

    ue_positions_m: np.ndarray
    distances_m: np.ndarray
    angles_deg: np.ndarray
    macro_gain_db: np.ndarray
    rx_power_dbm: np.ndarray
    visible: np.ndarray

    @property
    def n_ues(self) -> int:
        return self.rx_power_dbm.shape[0]


@dataclass(frozen=True)
class AssociationMap:
    """Per-UE serving, interfering and muted RUs plus the resulting cells."""

    scheme: SchemeKind
    serving: tuple[tuple[int, ...], ...]
    interferers: tuple[tuple[int, ...], ...]
    muted: tuple[tuple[int, ...], ...]
    cells: tuple[Cell, ...]

    @property
    def n_ues(self) -> int:
        return len(self.serving)

    @property
    def muted_rus(self) -> frozenset[int]:
        return frozenset(ru for per_ue in self.muted for ru in per_ue)

    def serving_mask(self, n_rus: int) -> np.ndarray:
        return _to_mask(self.serving, n_rus)

    def interferer_mask(self, n_rus: int) -> np.ndarray:
        return _to_mask(self.interferers, n_rus)


def _to_mask(sets: tuple[tuple[int, ...], ...], n_rus: int) -> np.ndarray:
    mask = np.zeros((len(sets), n_rus), dtype=bool)
    for ue, ru_ids in enumerate(sets):
        mask[ue, list(ru_ids)] = True
    return mask


def visible_rus(ue_pos: float, rus: list[RadioUnit], layout: TrackLayout) -> list[RadioUnit]:
    """RUs whose boresight angle to the UE is at most 90 degrees.

    Raises:
        CoverageError: If no RU faces the UE
    """
    visible = [
        ru
        for ru in rus
        if link_geometry(ue_pos, ru, layout)[1] <= MAX_VISIBLE_ANGLE_DEG + ANGLE_TOLERANCE_DEG
    ]
    if not visible:
        raise CoverageError(ue_pos)
    return visible


def wideband_rx_power_dbm(
    ue_pos: float,
    ru: RadioUnit,
    layout: TrackLayout,
    pathloss: PathlossParams,
    pattern: AntennaPattern,
    penetration_db: float,
) -> float:
    """Transmit power plus macroscopic gain, without fading."""
    return watts_to_dbm(ru.tx_power_w) + macro_gain(ue_pos, ru, layout, pathloss, pattern, penetration_db)


def link_budget(
    ue_positions_m: np.ndarray,
    rus: list[RadioUnit],
    layout: TrackLayout,
    pathloss: PathlossParams,
    pattern: AntennaPattern,
    penetration_db: float,
) -> LinkBudget:
    """Evaluate geometry, macro gain and visibility for all UEs at once.

    Raises:
        CoverageError: If some UE sees no RU
    """
    ue_positions_m = np.asarray(ue_positions_m, dtype=float)
    distances, angles = link_geometry_matrix(ue_positions_m, rus, layout)
    gains = macro_gain_matrix(distances, angles, pathloss, pattern, penetration_db)
    tx_dbm = np.array([watts_to_dbm(ru.tx_power_w) for ru in rus])
    visible = angles <= MAX_VISIBLE_ANGLE_DEG + ANGLE_TOLERANCE_DEG

    blind = np.flatnonzero(~visible.any(axis=1))
    if blind.size:
        raise CoverageError(float(ue_positions_m[blind[0]]))

    return LinkBudget(
        ue_positions_m=ue_positions_m,
        distances_m=distances,
        angles_deg=angles,
        macro_gain_db=gains,
        rx_power_dbm=tx_dbm[None, :] + gains,
        visible=visible,
    )


def _ranked_visible(budget: LinkBudget, ue: int, ru_ids: np.ndarray) -> list[int]:
    """Visible RU ids of `ue`, strongest first; equal power goes to the lower id."""
    columns = np.flatnonzero(budget.visible[ue])
    powers = budget.rx_power_dbm[ue, columns]
    order = np.lexsort((ru_ids[columns], -powers))
    return [int(ru_ids[columns[i]]) for i in order]


class _DisjointSet:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # the lower id stays root so it names the merged cell
            self.parent[max(ra, rb)] = min(ra, rb)


def associate(
    budget: LinkBudget,
    rus: list[RadioUnit],
    scheme: SchemeKind | str,
) -> AssociationMap:
    """Build serving, interferer and muted sets for every UE.

    Baseline and relay serve each UE from its strongest RU, one cell per RU.
    Coordination and cooperation group each UE with its dominant pair; pairs
    sharing an RU merge into one cell that schedules one RB grid.
    Under coordination the UE's strongest RU sends each RB while the rest of
    the cell stays silent on it. Under cooperation the dominant pair sends the
    RB jointly.

    Args:
        budget: Link budget of the UEs to associate
        rus: Radio units, in the column order of `budget`
        scheme: Collaboration scheme

    Returns:
        AssociationMap with one Cell per serving RU or merged group that has UEs
    """
    scheme = SchemeKind(scheme)
    ru_ids = np.array([ru.id for ru in rus])

    merged = scheme in (SchemeKind.COORDINATION, SchemeKind.COOPERATION)
    serving, interferers, muted = [], [], []
    dominant = []
    for ue in range(budget.n_ues):
        ranked = _ranked_visible(budget, ue, ru_ids)
        dominant.append(tuple(sorted(ranked[:2])) if merged else (ranked[0],))
        serving.append(dominant[-1] if scheme == SchemeKind.COOPERATION else (ranked[0],))
        muted.append(tuple(ranked[1:2]) if scheme == SchemeKind.COORDINATION else ())

    if merged:
        groups = _DisjointSet()
        for pair in dominant:
            groups.find(pair[0])
            if len(pair) == 2:
                groups.union(*pair)
        cell_of_ue = [groups.find(pair[0]) for pair in dominant]
        members: dict[int, list[int]] = {}
        for ru_id in list(groups.parent):
            members.setdefault(groups.find(ru_id), []).append(ru_id)
    else:
        cell_of_ue = [pair[0] for pair in dominant]
        members = {ru_id: [ru_id] for ru_id in set(cell_of_ue)}

    for ue in range(budget.n_ues):
        cell_rus = set(members[cell_of_ue[ue]])
        ranked = _ranked_visible(budget, ue, ru_ids)
        excluded = set(serving[ue]) | set(muted[ue])
        # RUs of a merged cell never interfere with the cell's own UEs
        extra = tuple(sorted(r for r in ranked if r in cell_rus and r not in excluded))
        muted[ue] = tuple(sorted(muted[ue] + extra))
        excluded |= set(extra)
        interferers.append(tuple(sorted(r for r in ranked if r not in excluded)))

    cells = []
    for cell_id in sorted(set(cell_of_ue)):
        ue_ids = tuple(ue for ue in range(budget.n_ues) if cell_of_ue[ue] == cell_id)
        cell_rus = tuple(sorted(members[cell_id]))
        cells.append(Cell(cell_id, cell_rus, ue_ids))

    for ue in range(budget.n_ues):
        if set(serving[ue]) & set(interferers[ue]):
            raise AssociationError(ue, "serving and interferer sets overlap")

    logger.debug(
        f"Associated {budget.n_ues} UEs under {scheme}: "
        f"{len(cells)} cells, loads {_cell_loads(cells)}"
    )
    return AssociationMap(
        scheme=scheme,
        serving=tuple(serving),
        interferers=tuple(interferers),
        muted=tuple(muted),
        cells=tuple(cells),
    )


def _cell_loads(cells: list[Cell]) -> dict[int, int]:
    return {cell.cell_id: len(cell.ue_ids) for cell in cells}


def per_ru_load(association: AssociationMap) -> dict[int, int]:
    """UE count per scheduling cell, keyed by the cell's lowest RU id."""
    return _cell_loads(association.cells)


def relay_terminal(
    train: TrainState, layout: TrackLayout, relay_height_m: float
) -> tuple[np.ndarray, TrackLayout]:
    """Position and layout of the single roof antenna that stands in for all passengers."""
    relay_layout = TrackLayout(
        layout.site_positions_m,
        layout.site_lateral_offset_m,
        layout.ru_height_m,
        relay_height_m,
    )
    return np.array([train.center_m]), relay_layout


def expected_next_site_fraction(
    center_rel_m: float, train_length_m: float, boundary_m: float = 500.0
) -> float:
    """Expected share of uniformly placed UEs already past the association boundary."""
    fraction = (center_rel_m + train_length_m / 2.0 - boundary_m) / train_length_m
    return float(np.clip(fraction, 0.0, 1.0))
