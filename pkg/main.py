# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Entry point script for ltcar-explorer.
"""

import argparse
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional

from src.config import load_run_config
from src.utils.exceptions import ConfigError, NumericalError, OutputConflictError
from src.workflow import enable_debug_logging, run_command

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="ltcar-explorer: load-transfer car equilibria and trajectory exploration"
    )
    subparsers = parser.add_subparsers(dest="command", required=True, help="Command")

    tire_parser = subparsers.add_parser("tire", help="Tire force curves and envelope")
    equilibria_parser = subparsers.add_parser("equilibria", help="Trace equilibrium branches")
    equilibria_parser.add_argument("--speeds", type=_floats, help="Speeds, e.g. 20,30,40")
    equilibria_parser.add_argument("--model", choices=["ltcar", "bicycle"])
    equilibria_parser.add_argument("--tire-mode", choices=["pacejka", "linear"])
    simulate_parser = subparsers.add_parser("simulate", help="Integrate the car model")
    simulate_parser.add_argument("--model", choices=["ltcar", "bicycle"])
    explore_parser = subparsers.add_parser("explore", help="Run an exploration")
    explore_parser.add_argument("--track", help="Built-in track name or segment file")
    explore_parser.add_argument(
        "--schedule", choices=["aggressiveness", "speed", "single"]
    )
    explore_parser.add_argument("--model", choices=["ltcar", "bicycle"])
    explore_parser.add_argument("--tire-mode", choices=["pacejka", "linear", "auto"])

    # Common arguments for all commands
    for subparser in (tire_parser, equilibria_parser, simulate_parser, explore_parser):
        subparser.add_argument("--config", default=None, help="YAML configuration file")
        subparser.add_argument("--output-dir", help="Directory receiving the outputs")
        subparser.add_argument(
            "--force", action="store_true", help="Overwrite outputs of another config"
        )
        subparser.add_argument("--debug", action="store_true", help="Enable debug logging")
        subparser.add_argument("--threads", type=int, help="Worker threads")
        subparser.add_argument("--dt", type=float, help="Sample time [s]")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Nested configuration overrides for the flags that were given."""
    overrides: Dict[str, Any] = {}
    if args.dt is not None:
        overrides["solver"] = {"dt": args.dt}
    block: Dict[str, Any] = {}
    for flag, key in (
        ("speeds", "speeds"),
        ("model", "model"),
        ("tire_mode", "tire_mode"),
        ("track", "track"),
        ("schedule", "schedule"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            block[key] = value
    if block:
        overrides[args.command] = block
    return overrides


def exit_code(error: BaseException) -> int:
    if isinstance(error, (OutputConflictError, OSError)):
        return EXIT_IO
    if isinstance(error, (ConfigError, ValueError)):
        return EXIT_CONFIG
    if isinstance(error, (NumericalError, ArithmeticError)):
        return EXIT_NUMERIC
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.debug:
        enable_debug_logging()
    try:
        config = load_run_config(args.config, overrides_from_args(args))
        run = config.configuration()
        if args.output_dir:
            run = replace(run, output_dir=args.output_dir)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("threads must be at least 1", field="--threads")
            run = replace(run, threads=args.threads)
        if args.force:
            run = replace(run, force=True)
        written = run_command(args.command, config, run)
    except (ConfigError, ValueError, ArithmeticError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return exit_code(e)
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
