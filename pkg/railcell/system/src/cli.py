"""Command-line entry point: load config, run sweeps, write results."""

import argparse
import logging
import os
import sys
from pathlib import Path

from ...radio.src.exceptions import InvalidConfigurationError, SimulationError
from .config import SCHEME_CHOICES, ScenarioConfig, parse_config, parse_positions
from .engine import penetration_sweep, sweep
from .mobility import mobility_report
from .output import (
    RunManifest,
    manifest_path,
    write_mobility_csv,
    write_penetration_csv,
    write_plot,
    write_sweep_csv,
)

logger = logging.getLogger(__name__)

CONFIG_ENV = "RAILCELL_CONFIG"
LOG_LEVEL_ENV = "RAILCELL_LOG_LEVEL"
DEFAULT_OUT = "railcell_sweep.csv"

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidConfigurationError(f"Invalid arguments: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="railcell-sim",
        description="Downlink throughput and handover simulator for a high-speed train.",
    )
    parser.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    parser.add_argument("--scheme", choices=SCHEME_CHOICES)
    parser.add_argument("--positions", help="START:STEP:STOP or comma list, meters in the RU span")
    parser.add_argument("--drops", type=int, help="drops per (scheme, position)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--workers", type=int, help="parallel drop workers")
    parser.add_argument("--out", default=DEFAULT_OUT, help="sweep CSV path")
    parser.add_argument("--mobility-out", help="mobility CSV path")
    parser.add_argument("--plot", help="SVG plot path")
    parser.add_argument("--penetration-db", type=float, help="carriage penetration loss")
    parser.add_argument("--penetration-sweep", help="comma list of penetration losses in dB")
    parser.add_argument("--penetration-out", help="penetration sweep CSV path")
    parser.add_argument("--log-level", help=f"logging level (default: ${LOG_LEVEL_ENV} or INFO)")
    return parser


def _configure_logging(level_name: str | None) -> None:
    level_name = (level_name or os.getenv(LOG_LEVEL_ENV) or "INFO").upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise InvalidConfigurationError(f"Unknown log level '{level_name}'")
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    """Config file (flag, then environment, then defaults) with flag overrides applied."""
    config_path = args.config or os.getenv(CONFIG_ENV)
    config = parse_config(config_path) if config_path else ScenarioConfig()

    overrides = {}
    if args.scheme is not None:
        overrides["scheme"] = args.scheme
    if args.positions is not None:
        try:
            overrides["positions_m"] = parse_positions(args.positions)
        except ValueError as e:
            raise InvalidConfigurationError(f"Invalid --positions '{args.positions}': {e}") from e
    if args.drops is not None:
        overrides["drops_per_point"] = args.drops
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.penetration_db is not None:
        overrides["penetration_db"] = args.penetration_db
    return config.with_overrides(**overrides) if overrides else config


def _parse_penetration_values(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise InvalidConfigurationError(f"Invalid --penetration-sweep '{text}': {e}") from e
    if not values or any(v < 0 for v in values):
        raise InvalidConfigurationError(f"--penetration-sweep needs non-negative values, got '{text}'")
    return values


def run(args: argparse.Namespace) -> None:
    from ... import __version__

    config = resolve_config(args)
    outputs = {}

    result = sweep(config)
    outputs["sweep"] = str(write_sweep_csv(args.out, result))

    if args.mobility_out:
        outputs["mobility"] = str(write_mobility_csv(args.mobility_out, mobility_report(config)))

    if args.penetration_sweep:
        values = _parse_penetration_values(args.penetration_sweep)
        out = args.penetration_out or str(Path(args.out).with_suffix("")) + "_penetration.csv"
        outputs["penetration"] = str(write_penetration_csv(out, penetration_sweep(config, values)))

    if args.plot:
        outputs["plot"] = str(write_plot(args.plot, result))

    RunManifest(config, __version__, outputs).write(manifest_path(args.out))


def main(argv: list[str] | None = None) -> int:
    """Run the simulator and return the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.log_level)
        run(args)
    except InvalidConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except SimulationError as e:
        print(f"Simulation error [{e.error_code}]: {e}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR
    except Exception as e:
        logger.exception("Unexpected failure")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())
