"""Result files: sweep and mobility CSVs, the run manifest and the SVG plot."""

import csv
import logging
from dataclasses import dataclass, field
from datetime import UTC, datetime
from pathlib import Path

from .config import ScenarioConfig, serialize_config
from .engine import SweepResult
from .mobility import MobilityRow

logger = logging.getLogger(__name__)

SWEEP_HEADER = ("scheme", "position_m", "mean_mbps", "ci95_mbps", "n_drops", "per_ue_mean_mbps")
MOBILITY_HEADER = (
    "mode",
    "cell_length_m",
    "speed_kmh",
    "handover_period_s",
    "total_per_ue_handovers",
    "blocked_ues",
)
PENETRATION_HEADER = ("penetration_db", *SWEEP_HEADER)
MANIFEST_SUFFIX = ".manifest"


# first-run notices matplotlib emits while it indexes system fonts
FONT_CACHE_NOTICES = ("Matplotlib is building the font cache", "generated new fontManager")


def drop_font_cache_notices(record: logging.LogRecord) -> bool:
    return not record.getMessage().startswith(FONT_CACHE_NOTICES)


def _num(value: float) -> str:
    return f"{value:.10g}"


def sweep_rows(result: SweepResult) -> list[list[str]]:
    return [
        [
            str(point.scheme),
            _num(point.position_m),
            _num(point.mean_mbps),
            _num(point.ci95_mbps),
            str(point.n_drops),
            _num(point.per_ue_mean_mbps),
        ]
        for point in result.points
    ]


def _write_csv(path: str | Path, header: tuple[str, ...], rows: list[list[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def write_sweep_csv(path: str | Path, result: SweepResult) -> Path:
    return _write_csv(path, SWEEP_HEADER, sweep_rows(result))


def write_penetration_csv(path: str | Path, results: dict[float, SweepResult]) -> Path:
    rows = [
        [_num(penetration_db), *row]
        for penetration_db, result in sorted(results.items())
        for row in sweep_rows(result)
    ]
    return _write_csv(path, PENETRATION_HEADER, rows)


def write_mobility_csv(path: str | Path, rows: list[MobilityRow]) -> Path:
    return _write_csv(
        path,
        MOBILITY_HEADER,
        [
            [
                str(row.mode),
                _num(row.cell_length_m),
                _num(row.speed_kmh),
                _num(row.handover_period_s),
                str(row.total_per_ue_handovers),
                str(row.blocked_ues),
            ]
            for row in rows
        ],
    )


@dataclass(frozen=True)
class RunManifest:
    """Resolved config of a run plus provenance, written next to the results.

    The rendered text is itself a valid config file: provenance lines are
    comments.
    """

    config: ScenarioConfig
    tool_version: str
    output_paths: dict[str, str] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now(UTC).isoformat())

    @property
    def master_seed(self) -> int:
        return self.config.master_seed

    def to_text(self) -> str:
        lines = [
            "# railcell-sim run manifest",
            f"# tool_version: {self.tool_version}",
            f"# timestamp: {self.timestamp}",
            f"# master_seed: {self.master_seed}",
        ]
        lines += [f"# output.{name}: {path}" for name, path in sorted(self.output_paths.items())]
        return "\n".join(lines) + "\n" + serialize_config(self.config)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.to_text(), encoding="utf-8")
        logger.info(f"Wrote run manifest to {path}")
        return path


def manifest_path(csv_path: str | Path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.name + MANIFEST_SUFFIX)


def write_plot(path: str | Path, result: SweepResult) -> Path:
    """Mean throughput with 95 % error bars versus position, one line per scheme."""
    logging.getLogger("matplotlib.font_manager").addFilter(drop_font_cache_notices)

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for scheme in result.schemes:
        points = [p for p in result.points if p.scheme == scheme]
        ax.errorbar(
            [p.position_m for p in points],
            [p.mean_mbps for p in points],
            yerr=[p.ci95_mbps for p in points],
            marker="o",
            capsize=3,
            label=str(scheme),
        )
    ax.set_xlabel("Train centre position [m]")
    ax.set_ylabel("Train average throughput [Mbit/s]")
    ax.grid(True, alpha=0.3)
    ax.legend()

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no Date entry in the SVG metadata
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote plot to {path}")
    return path
