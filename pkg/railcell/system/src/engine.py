"""Drop execution and position sweeps."""

import asyncio
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ...radio.src.channel import (
    AntennaPattern,
    FadingProcess,
    PathlossParams,
    doppler_hz,
    rb_center_offsets_hz,
)
from ...radio.src.geometry import (
    TrackLayout,
    TrainState,
    build_radio_units,
    place_ues,
    ue_track_positions,
)
from ...radio.src.phy import (
    Codebook,
    InterferenceMode,
    LinkAbstraction,
    dbm_to_mw,
    noise_power_dbm,
    rb_rate,
    sinr_grid,
    spectral_efficiency,
)
from .config import ScenarioConfig
from .scheduler import PfState, pf_schedule, update_pf_state
from .schemes import (
    RELAY_PENETRATION_DB,
    SchemeKind,
    associate,
    link_budget,
    relay_terminal,
)

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
CI_Z95 = 1.96

# stable seed index per scheme, independent of which schemes a run selects
SCHEME_INDEX = {scheme: index for index, scheme in enumerate(SchemeKind)}
DEFAULT_SCHEMES = (SchemeKind.BASELINE, SchemeKind.COORDINATION, SchemeKind.COOPERATION)


@dataclass(frozen=True)
class DropResult:
    """Throughput of one drop in Mbit/s."""

    aggregate_mbps: float
    per_ue_mbps: tuple[float, ...]
    seed: int
    n_active_ues: int

    @property
    def per_ue_mean_mbps(self) -> float:
        """Train aggregate shared over the active passengers."""
        return self.aggregate_mbps / self.n_active_ues


@dataclass(frozen=True)
class SweepPoint:
    scheme: SchemeKind
    position_m: float
    mean_mbps: float
    ci95_mbps: float
    n_drops: int
    per_ue_mean_mbps: float


@dataclass(frozen=True)
class SweepResult:
    """Mean train throughput and 95 % confidence per (scheme, position)."""

    points: tuple[SweepPoint, ...]

    def point(self, scheme: SchemeKind | str, position_m: float) -> SweepPoint:
        scheme = SchemeKind(scheme)
        for point in self.points:
            if point.scheme == scheme and math.isclose(point.position_m, position_m, abs_tol=1e-9):
                return point
        raise KeyError(f"No sweep point for {scheme} at {position_m} m")

    @property
    def schemes(self) -> tuple[SchemeKind, ...]:
        return tuple(dict.fromkeys(point.scheme for point in self.points))


def _splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, scheme_index: int, position_index: int, drop_index: int) -> int:
    """Seed of one drop.

    The indices are packed into 8 + 16 + 32 bits, mixed, XORed with the
    master seed and mixed again. Both mixing steps are bijections on 64-bit
    integers, so distinct indices never share a seed under one master seed.
    """
    if not 0 <= scheme_index < 1 << 8:
        raise ValueError(f"scheme_index out of range: {scheme_index}")
    if not 0 <= position_index < 1 << 16:
        raise ValueError(f"position_index out of range: {position_index}")
    if not 0 <= drop_index < 1 << 32:
        raise ValueError(f"drop_index out of range: {drop_index}")
    packed = (scheme_index << 48) | (position_index << 32) | drop_index
    return _splitmix64(_splitmix64(packed) ^ (master_seed & MASK64))


def confidence_interval(values) -> tuple[float, float]:
    """Mean and normal-approximation 95 % half-width 1.96 s / sqrt(n)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("Confidence interval of an empty sample")
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(CI_Z95 * values.std(ddof=1) / math.sqrt(values.size))


def resolve_schemes(name: str) -> tuple[SchemeKind, ...]:
    """'all' selects the three direct-link schemes."""
    if name == "all":
        return DEFAULT_SCHEMES
    return (SchemeKind(name),)


def run_drop(
    config: ScenarioConfig, position_m: float, scheme: SchemeKind | str, drop_seed: int
) -> DropResult:
    """Simulate one drop with the train centre quasi-static at `position_m`.

    Args:
        config: Scenario parameters
        position_m: Train centre relative to the second site
        scheme: Collaboration scheme
        drop_seed: Seed of every random draw in the drop

    Returns:
        DropResult with total bits over the drop duration per UE

    Raises:
        CoverageError: If the position leaves some UE without a visible RU
    """
    scheme = SchemeKind(scheme)
    rng = np.random.default_rng(drop_seed)

    layout = TrackLayout.equidistant(
        config.n_sites,
        config.inter_ru_distance_m,
        config.site_lateral_offset_m,
        config.ru_height_m,
        config.ue_height_m,
    )
    rus = build_radio_units(layout, config.tx_power_w, config.n_tx_antennas)
    train = TrainState(
        config.train_length_m, config.train_speed_mps, config.span_start_m + position_m
    )
    pathloss = PathlossParams(config.carrier_mhz, config.ru_height_m, config.min_distance_m)
    pattern = AntennaPattern(config.theta_3db_deg, config.front_to_back_db)

    if scheme == SchemeKind.RELAY:
        positions, layout = relay_terminal(train, layout, config.relay_height_m)
        penetration_db = RELAY_PENETRATION_DB
        association_scheme = SchemeKind.BASELINE
    else:
        ues = place_ues(config.n_active_ues, config.train_length_m, rng)
        positions = ue_track_positions(train, ues)
        penetration_db = config.penetration_db
        association_scheme = scheme

    budget = link_budget(positions, rus, layout, pathloss, pattern, penetration_db)
    association = associate(budget, rus, association_scheme)

    la = LinkAbstraction(
        config.alpha,
        config.se_max,
        config.rb_bandwidth_khz * 1e3,
        config.n_rb,
        config.bandwidth_mhz * 1e6,
    )
    codebook = Codebook.for_antennas(config.n_tx_antennas)
    mode = InterferenceMode(config.interference_mode)
    noise_mw = float(dbm_to_mw(noise_power_dbm(config.noise_psd_dbm_hz, la.rb_bandwidth_hz, config.noise_figure_db)))
    rx_power_mw = dbm_to_mw(budget.rx_power_dbm) / config.n_rb
    serving_mask = association.serving_mask(len(rus))
    interferer_mask = association.interferer_mask(len(rus))

    # fading is only drawn for links an RU actually radiates on
    ue_index, ru_index = np.nonzero(budget.visible)
    fading = FadingProcess(
        n_links=ue_index.size,
        n_tx=config.n_tx_antennas,
        doppler_hz=doppler_hz(config.train_speed_mps, config.carrier_mhz * 1e6),
        tti_s=config.tti_s,
        rb_offsets_hz=rb_center_offsets_hz(config.n_rb, la.rb_bandwidth_hz),
        rng=rng,
    )
    channel = np.zeros((budget.n_ues, len(rus), config.n_rb, config.n_tx_antennas), dtype=complex)

    pf_states = {
        cell.cell_id: PfState.initial(len(cell.ue_ids), config.pf_beta, config.pf_epsilon_bps)
        for cell in association.cells
    }
    bits = np.zeros(budget.n_ues)

    for _ in range(config.ttis_per_drop):
        channel[ue_index, ru_index] = fading.coefficients()
        sinr = sinr_grid(rx_power_mw, channel, serving_mask, interferer_mask, noise_mw, codebook, mode, rng)
        rates = rb_rate(spectral_efficiency(sinr, la), la)

        for cell in association.cells:
            ue_ids = list(cell.ue_ids)
            grid = pf_schedule(rates[ue_ids], pf_states[cell.cell_id])
            pf_states[cell.cell_id] = update_pf_state(pf_states[cell.cell_id], grid.achieved_bps)
            bits[ue_ids] += grid.achieved_bps * config.tti_s

        fading.advance()

    duration_s = config.ttis_per_drop * config.tti_s
    per_ue_mbps = bits / duration_s / 1e6
    result = DropResult(
        aggregate_mbps=float(per_ue_mbps.sum()),
        per_ue_mbps=tuple(float(x) for x in per_ue_mbps),
        seed=drop_seed,
        n_active_ues=config.n_active_ues,
    )
    logger.debug(
        f"Drop {scheme} at {position_m:.1f} m (seed {drop_seed}): {result.aggregate_mbps:.3f} Mbit/s"
    )
    return result


def _run_jobs(config: ScenarioConfig, jobs) -> list[DropResult]:
    return [run_drop(config, position, scheme, seed) for scheme, _, position, seed in jobs]


class SweepEngine:
    """Fans drops out over (scheme, position, drop) and reduces them in index order."""

    def __init__(self, config: ScenarioConfig, workers: int | None = None):
        """Initialize the sweep engine.

        Args:
            config: Scenario parameters, including positions and master seed
            workers: Worker processes; defaults to `config.workers`, 1 runs inline
        """
        self.config = config
        self.workers = workers or config.workers

    async def run_sweep(self, schemes: tuple[SchemeKind, ...] | None = None) -> SweepResult:
        """Run every drop of the sweep and summarise each (scheme, position)."""
        config = self.config
        schemes = schemes or resolve_schemes(config.scheme)
        jobs = [
            (scheme, p_index, position, derive_seed(config.master_seed, SCHEME_INDEX[scheme], p_index, d))
            for scheme in schemes
            for p_index, position in enumerate(config.positions_m)
            for d in range(config.drops_per_point)
        ]
        logger.info(
            f"Starting sweep: {len(schemes)} schemes x {len(config.positions_m)} positions "
            f"x {config.drops_per_point} drops ({self.workers} workers)"
        )
        started = time.perf_counter()

        if self.workers > 1:
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                drops = await asyncio.gather(
                    *(
                        loop.run_in_executor(pool, run_drop, config, position, scheme, seed)
                        for scheme, _, position, seed in jobs
                    )
                )
        else:
            # a single worker runs the drops in order off the event loop
            drops = await asyncio.to_thread(_run_jobs, config, jobs)

        points = []
        per_point = config.drops_per_point
        for start in range(0, len(jobs), per_point):
            scheme, _, position, _ = jobs[start]
            chunk = drops[start : start + per_point]
            mean, ci95 = confidence_interval([d.aggregate_mbps for d in chunk])
            per_ue_mean = float(np.mean([d.per_ue_mean_mbps for d in chunk]))
            points.append(SweepPoint(scheme, position, mean, ci95, len(chunk), per_ue_mean))
            logger.info(f"{scheme} @ {position:g} m: {mean:.2f} +/- {ci95:.2f} Mbit/s")

        logger.info(f"Sweep finished in {time.perf_counter() - started:.1f} s")
        return SweepResult(tuple(points))


def sweep(config: ScenarioConfig) -> SweepResult:
    """Synchronous entry point for a full sweep."""
    return asyncio.run(SweepEngine(config).run_sweep())


def penetration_sweep(config: ScenarioConfig, values_db) -> dict[float, SweepResult]:
    """Repeat the sweep for each penetration loss; seeds match across values."""
    results = {}
    for value in values_db:
        logger.info(f"Penetration sweep: {value:g} dB")
        results[float(value)] = sweep(config.with_overrides(penetration_db=float(value)))
    return results
