"""CLI entry point."""
import argparse
import logging
import signal
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from clusterbell.core import config
from clusterbell.core.errors import ClusterBellError, ConfigError, SearchSpaceError, UnsupportedInputSetError

logger = logging.getLogger(__name__)


def setup_logging(debug: bool = False) -> None:
    level = logging.DEBUG if debug else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def signal_handler(signum, _frame):
    logger.info("Received signal %s, shutting down", signum)
    sys.exit(0)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # None means "keep the config file / default value"
    common.add_argument("--config", type=Path, help="JSON experiment config; flags override it")
    common.add_argument("--game", choices=["cbf", "ss"], help="Game to play or bound (default: cbf)")
    common.add_argument("--inputs", choices=["full", "mermin55", "hlf8", "hlf5", "hlfn5"],
                        help="Input set (default: full)")
    common.add_argument("--n", type=int, help=f"Cycle length (default: {config.DEFAULT_QUBITS})")
    common.add_argument("--depth", type=int, help="Classical circuit depth (default: 0 and 1)")
    common.add_argument("--shots", type=int, help=f"Shots per input or setting (default: {config.DEFAULT_SHOTS})")
    common.add_argument("--seed", type=int, help="Root seed, required by play, tomo and fit")
    common.add_argument("--noise", help="Noise model: none, fitted, or a JSON file")
    common.add_argument("--out", type=Path, help="Output directory (default: results)")
    common.add_argument("--format", choices=["json", "csv"], help="Extra table output format")
    common.add_argument("--workers", type=int,
                        help=f"Worker threads (default: ${config.WORKERS_ENV_VAR} or 1)")
    common.add_argument("--readout", type=float, nargs="+", metavar="RATE",
                        help="Readout flip rates p(1|0) [p(0|1)] injected and then corrected")
    common.add_argument("--form", choices=["RXX", "CZ"], help="Preparation circuit form (default: RXX)")
    common.add_argument("--no-timing", dest="timing", action="store_false", default=None,
                        help="Leave wall time out of bounds.json")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")
    return common


def parse_arguments(argv: Optional[Sequence[str]] = None):
    parser = argparse.ArgumentParser(
        prog="clusterbell",
        description="clusterbell - nonlocal games and tomography on cycle cluster states",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Classical bounds for the HLF5 stabilizer submeasurement game
    python -m clusterbell bounds --game ss --inputs hlf5

    # Play the full CBF game without noise
    python -m clusterbell play --game cbf --inputs full --noise none --shots 100 --seed 7

    # Synthetic tomography with the fitted device model, then the summary tables
    python -m clusterbell tomo --noise fitted --shots 5000 --seed 1 --out run
    python -m clusterbell report --out run
        """,
    )
    common = _common_options()
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("play", parents=[common], help="Play a game with the quantum strategy")
    bounds = sub.add_parser("bounds", parents=[common], help="Classical depth-D success bounds")
    bounds.add_argument("--obstruction", action="store_true", default=None,
                        help="Also run the GF(2) parity obstruction check")
    tomo = sub.add_parser("tomo", parents=[common], help="Synthetic stabilizer tomography")
    tomo.add_argument("--plan", choices=["greedy", "reference"], help="Measurement grouping (default: greedy)")
    fit = sub.add_parser("fit", parents=[common], help="Grid-fit the noise model to a stabilizer table")
    fit.add_argument("--reference", help="Stabilizer CSV, or published / published:raw (default: published)")
    fit.add_argument("--grid", type=Path, help="JSON fit grid (default: built-in grid)")
    sub.add_parser("report", parents=[common], help="Merge bounds, play and tomography results")
    plot = sub.add_parser("plot-data", parents=[common], help="CSV series behind the figures")
    plot.add_argument("--artifact", type=Path, help="fit.json or a stabilizer CSV")
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace):
    from clusterbell.controller import ExperimentConfig, load_noise

    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for name in ("game", "inputs", "n", "depth", "shots", "seed", "out", "format", "workers", "form",
                 "timing", "plan", "reference", "grid", "artifact", "obstruction"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.noise is not None:
        overrides["noise"] = load_noise(args.noise)
    if args.readout is not None:
        overrides["readout"] = tuple(args.readout)
    return replace(cfg, **overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_arguments(argv)
    setup_logging(args.debug)
    signal.signal(signal.SIGINT, signal_handler)
    if hasattr(signal, "SIGTERM"):
        signal.signal(signal.SIGTERM, signal_handler)
    try:
        from clusterbell.controller import ExperimentController

        cfg = build_config(args)
        return ExperimentController(cfg).run(args.command)
    except (ConfigError, UnsupportedInputSetError) as exc:
        logger.exception("Invalid configuration: %s", exc)
        return config.EXIT_CONFIG_ERROR
    except SearchSpaceError as exc:
        logger.exception("Refused to search: %s", exc)
        return config.EXIT_COMPUTE_REFUSAL
    except OSError as exc:
        logger.exception("I/O failure: %s", exc)
        return config.EXIT_IO_ERROR
    except ClusterBellError:
        logger.exception("Command failed")
        return config.EXIT_FAILURE
    except Exception:  # noqa: BLE001
        logger.exception("Fatal error")
        return config.EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
