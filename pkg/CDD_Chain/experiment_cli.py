# CDD Chain Simulator - Command-line interface
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Command-line runner.

    cdd-chain run <config.json | preset> [--jobs K] [--out DIR] [--seed S] [--svg] [--xlsx] [--noise-csv]
    cdd-chain list-presets
    cdd-chain validate <config.json | preset>

Exit codes: 0 success, 1 config error, 2 constraint violation, 3 numerical failure.
"""

# Built-in modules
import argparse
import json
import logging
import os
import sys

# Local imports
from . import __version__
from .errors import CDDChainError
from .experiment_config import (
    list_presets,
    load_experiment_config,
    parse_config,
    serialize_config,
    with_overrides,
)
from .run_experiment import run_preset
from .utils import load_settings, setup_logger, timestamped_log_name
from .writers import write_run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdd-chain",
        description="Continuous dynamical decoupling of noisy spin chains.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--settings", default=None, help="Runtime settings JSON (default: $CONFIG_FILE)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment config or a shipped preset")
    run.add_argument("config", help="Path to a config JSON file, or a preset name")
    run.add_argument("--jobs", type=int, default=None, help="Parallel noise realizations")
    run.add_argument("--out", default=None, help="Output directory")
    run.add_argument("--seed", type=int, default=None, help="Override the base noise seed")
    run.add_argument("--svg", action="store_true", help="Also write one SVG plot per curve set")
    run.add_argument("--xlsx", action="store_true", help="Also write a formatted xlsx workbook")
    run.add_argument("--noise-csv", action="store_true", help="Also dump the first noise realization")

    sub.add_parser("list-presets", help="List the shipped presets")

    validate = sub.add_parser("validate", help="Validate a config and print the resolved document")
    validate.add_argument("config", help="Path to a config JSON file, or a preset name")
    return parser


def load_target(target: str):
    """A config file path, or the name of a shipped preset."""
    if not os.path.exists(target) and target in list_presets():
        return parse_config({"preset": target})
    return load_experiment_config(target)


def _summary(result, paths: list) -> None:
    logging.info("=" * 60)
    logging.info(f"Run summary: {result.config.name}")
    for table, meta in zip(result.tables, result.metadata["tables"]):
        logging.info(f"Curve set {table.name} ({', '.join(meta['curves'])})")
        for column, metric in table.metrics.items():
            line = f"  {column}: peak {metric['peak']:.4f} at t={metric['t_peak']:.4f}"
            if "max_dev_from_effective" in metric:
                line += f", max deviation from effective {metric['max_dev_from_effective']:.4f}"
            logging.info(line)
    logging.info(f"Files written: {len(paths)}")
    logging.info(f"Wall time: {result.metadata['wall_time_s']:.1f} s")
    logging.info("=" * 60)


def cmd_run(args, settings: dict) -> int:
    cfg = load_target(args.config)
    if args.seed is not None:
        cfg = with_overrides(cfg, noise={"seed": args.seed})
    jobs = args.jobs if args.jobs is not None else int(settings.get("jobs", 1))
    out_dir = args.out or cfg.output["dir"] or os.path.join(settings["output_dir"], cfg.name)
    logging.info(f"Running '{cfg.name}' with {jobs} job(s), output to {out_dir}")

    result = run_preset(cfg, jobs=jobs, settings=settings)
    paths = write_run(
        result,
        out_dir,
        svg=args.svg or cfg.output["svg"],
        xlsx=args.xlsx or cfg.output["xlsx"],
        noise_csv=args.noise_csv or cfg.output["noise_csv"],
    )
    _summary(result, paths)
    return 0


def cmd_list_presets() -> int:
    for name in list_presets():
        document = parse_config({"preset": name})
        print(f"{name:24s} {document.description}")
    return 0


def cmd_validate(args) -> int:
    cfg = load_target(args.config)
    print(json.dumps(serialize_config(cfg), indent=2))
    logging.info(f"Config '{cfg.name}' is valid")
    return 0


def main(argv=None) -> int:
    """
    Entry point of the `cdd-chain` script.

    Returns:
        int: the process exit code.
    """
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.settings)
    except (FileNotFoundError, json.JSONDecodeError) as e:
        print(f"Cannot read settings: {e}", file=sys.stderr)
        return 1
    setup_logger(timestamped_log_name("experiment_cli"), settings)
    logging.info(f"cdd-chain {__version__}: {args.command}")

    try:
        if args.command == "run":
            return cmd_run(args, settings)
        if args.command == "list-presets":
            return cmd_list_presets()
        return cmd_validate(args)
    except CDDChainError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
