"""CLI entry point for the transitions recipe.

Usage:
    python -m hetero_bi.recipes.transitions --config run.json
    python -m hetero_bi.recipes.transitions --config sweep.json --jobs 4 --out results/
    HETERO_BI_LOG=debug hetero-bi --config odd.json --format json

Exit codes: 0 success, 2 verification failure, 3 solver failure,
4 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from hetero_bi.engine.errors import ConfigError, SolverConfigError
from hetero_bi.engine.schema import FORMATS, RunConfig, load_run_config
from hetero_bi.recipes.transitions.orchestrator import ExitCode, RunResult, TransitionRunner

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetero-bi",
        description="Compute and verify heteroclinic transitions of the relativistic action.",
    )
    parser.add_argument(
        "--config",
        type=Path,
        required=True,
        help="Run configuration (JSON, or YAML).",
    )
    parser.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Output directory (overrides output_dir in the config).",
    )
    parser.add_argument(
        "--format",
        choices=FORMATS,
        default=None,
        help="Profile file format (overrides the config).",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Multistart seed (overrides solver.seed).",
    )
    parser.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="Worker threads for sweeps.",
    )
    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Enable debug logging.",
    )
    return parser


def _log_level(verbose: bool) -> int:
    if verbose:
        return logging.DEBUG
    name = os.environ.get("HETERO_BI_LOG", "info").strip().lower()
    if name not in _LOG_LEVELS:
        raise ConfigError("HETERO_BI_LOG", f"expected one of {sorted(_LOG_LEVELS)}, got {name!r}")
    return _LOG_LEVELS[name]


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    changes: dict = {}
    if args.out is not None:
        changes["output_dir"] = args.out
    if args.format is not None:
        changes["format"] = args.format
    if args.jobs is not None:
        if args.jobs < 1:
            raise ConfigError("jobs", f"must be at least 1, got {args.jobs}")
        changes["jobs"] = args.jobs
    if args.seed is not None:
        changes["solver"] = config.solver.replace(seed=args.seed)
        changes["runs"] = tuple(
            dataclasses.replace(row, solver=row.solver.replace(seed=args.seed)) for row in config.runs
        )
    return dataclasses.replace(config, **changes) if changes else config


def _print_summary(config: RunConfig, result: RunResult) -> None:
    print(f"Command:    {config.command}")
    print(f"Output:     {config.output_dir}")
    for key, value in result.summary.items():
        if isinstance(value, float):
            print(f"{key + ':':<24}{value:.10g}")
        elif not isinstance(value, (list, dict)):
            print(f"{key + ':':<24}{value}")
    print(f"Files:      {len(result.files)}")
    print(f"Exit:       {int(result.exit_code)} ({result.exit_code.name.lower()})")


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would read as a verification failure.
        return 0 if exc.code in (0, None) else int(ExitCode.CONFIG_ERROR)

    try:
        level = _log_level(args.verbose)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.CONFIG_ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        config = _apply_overrides(load_run_config(args.config), args)
    except (ConfigError, SolverConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.CONFIG_ERROR)

    result = TransitionRunner(config).run()
    if result.error is not None:
        print(f"error: {result.error}", file=sys.stderr)
    _print_summary(config, result)
    return int(result.exit_code)


if __name__ == "__main__":
    sys.exit(main())
