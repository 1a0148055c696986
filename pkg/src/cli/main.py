"""Command-line entry point.

Usage:
    python -m src.cli evaluate  --config run.cfg [--set key=value ...]
    python -m src.cli compare   --config run.cfg --learn pca,dwt
    python -m src.cli subsample --config run.cfg --sizes 306,153,76,38
    python -m src.cli apply     --codec out/codec.clrc --data new.csv --direction roundtrip --out recon.csv

Exit status: 0 success with a qualifying dimension, 2 success without one,
1 on any error.

Environment variables:
    CLARE_LOG_LEVEL        Root log level (default INFO)
    CLARE_LOG_FORMAT       text | json
    CLARE_THREADS          Default worker budget (0 = all cores)
    CLARE_METRICS_ENABLED  Print OpenTelemetry fit/run metrics to the console
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from src.cli.commands import ApplyDirection, cmd_apply, cmd_compare, cmd_evaluate, cmd_subsample
from src.cli.config_loader import load_run_config, parse_overrides
from src.core.exceptions import ConfigError
from src.core.logging_config import configure_logging
from src.core.telemetry import configure_telemetry, shutdown_telemetry
from src.services.result_objects import ServiceResult

logger = logging.getLogger(__name__)

EXIT_QUALIFIED = 0
EXIT_ERROR = 1
EXIT_NOT_QUALIFIED = 2

_SHORTCUTS = ("data", "learn", "seed", "out", "threads", "sizes")


def _add_run_options(parser: argparse.ArgumentParser, with_sizes: bool = False) -> None:
    parser.add_argument("--config", help="key=value run configuration file")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override one config key (repeatable; wins over the config file)",
    )
    parser.add_argument("--data", help="dataset path (config key 'data')")
    parser.add_argument("--learn", help="learner, or comma-separated learners for compare")
    parser.add_argument("--seed", help="random seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--threads", help="worker threads (0 = all cores)")
    parser.add_argument("--verbose", action="store_true", help="log every (K, fold) task with its duration")
    if with_sizes:
        parser.add_argument("--sizes", help="comma-separated descending sample sizes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clare",
        description="Cross-validated evaluation of latent feature representations",
    )
    parser.add_argument("--log-level", help="override CLARE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_options(sub.add_parser("evaluate", help="evaluate one learner"))
    _add_run_options(sub.add_parser("compare", help="compare several learners on shared folds"))
    _add_run_options(sub.add_parser("subsample", help="sample-size experiment"), with_sizes=True)

    apply = sub.add_parser("apply", help="apply a saved codec to a CSV matrix")
    apply.add_argument("--codec", required=True, help="codec file written by evaluate (codec.clrc)")
    apply.add_argument("--data", required=True, help="CSV input (N x T, or N x K for decode)")
    apply.add_argument("--direction", choices=[d.value for d in ApplyDirection], default="roundtrip")
    apply.add_argument("--out", required=True, help="CSV output path")
    apply.add_argument("--id-column", type=int, help="0-based CSV column with row identifiers")
    return parser


def collect_overrides(args: argparse.Namespace) -> dict[str, str]:
    """--set pairs first, then the shortcut flags (which win)."""
    overrides = parse_overrides(args.overrides)
    for key in _SHORTCUTS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = str(value)
    if args.verbose:
        overrides["verbose"] = "true"
    return overrides


def exit_status(result: ServiceResult) -> int:
    if not result.success:
        return EXIT_ERROR
    return EXIT_QUALIFIED if getattr(result, "criterion_met", True) else EXIT_NOT_QUALIFIED


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(level=args.log_level)
    configure_telemetry()
    try:
        if args.command == "apply":
            result: ServiceResult = cmd_apply(args.codec, args.data, args.direction, args.out, args.id_column)
        else:
            try:
                config = load_run_config(args.config, collect_overrides(args))
            except (ConfigError, OSError) as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_ERROR
            commands = {"evaluate": cmd_evaluate, "compare": cmd_compare, "subsample": cmd_subsample}
            result = commands[args.command](config)
    finally:
        shutdown_telemetry()

    if result.success:
        print(result.message)
    else:
        print(f"error: {result.message}", file=sys.stderr)
    return exit_status(result)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
