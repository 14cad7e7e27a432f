# app/cli.py
"""
Command-line entry point for the experiments.

    python -m app.cli power --config configs/power_blob.yaml --out results/power --seed 7 --jobs 4
    python -m app.cli --env-file .env.local type1 --config configs/type1_blob.yaml

Exit code 0 on success, 2 for usage/configuration/data errors, 1 otherwise.
Errors are printed to stderr as one JSON object {"error": ..., "detail": ...}.
"""
import argparse
import json
import sys
from typing import List, Optional

from app.harness.reports import emit_reports
from app.harness.service import run_experiment
from app.utils.config_loader import load_env_file, load_experiment_config, parse_experiment_config
from app.utils.exceptions import ConfigError, Ec2stError
from app.utils.logger import get_logger, setup_logger

logger = get_logger()

COMMANDS = {
    "type1": "type1",
    "power": "power",
    "stopping-time": "stopping_time",
    "lambda-ablation": "lambda_ablation",
    "batch-order": "batch_order",
    "inflation-demo": "inflation_demo",
    "growth-rate": "growth_rate",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ec2st", description="Anytime-valid classifier two-sample test experiments")
    parser.add_argument("--log-level", default=None, help="Override the configured log level")
    parser.add_argument("--env-file", default=None, help="Read EC2ST_* settings from this file first")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, kind in COMMANDS.items():
        sub = subparsers.add_parser(command, help=f"Run a {kind} experiment")
        sub.add_argument("--config", default=None, help="YAML or JSON experiment file")
        sub.add_argument("--out", default=None, help="Output directory (overrides output_dir)")
        sub.add_argument("--seed", type=int, default=None, help="Master seed (overrides master_seed)")
        sub.add_argument("--jobs", type=int, default=None, help="Worker processes (overrides jobs)")
        sub.add_argument("--svg", action="store_true", help="Also write an SVG plot of the curves")
    return parser


def resolve_config(args: argparse.Namespace):
    """Experiment config from --config (or defaults) with command-line overrides applied"""
    kind = COMMANDS[args.command]
    if args.config:
        config = load_experiment_config(args.config)
        if config.kind != kind:
            raise ConfigError(f"config file describes a {config.kind} experiment, not {kind}")
    else:
        config = parse_experiment_config({"kind": kind})

    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.out is not None:
        overrides["output_dir"] = args.out
    if overrides:
        config = parse_experiment_config({**config.model_dump(mode="json"), **overrides})
    return config


def _print_error(e: Exception):
    print(json.dumps({"error": type(e).__name__, "detail": str(e)}), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        setup_logger(args.log_level)
    try:
        if args.env_file and not load_env_file(args.env_file):
            raise ConfigError(f"environment file {args.env_file} not found")
        config = resolve_config(args)
        result = run_experiment(config)
        files = emit_reports(result, config.output_dir, svg=True if args.svg else None)
    except Ec2stError as e:
        _print_error(e)
        return 2
    except Exception as e:
        logger.exception(f"Experiment failed: {e}")
        _print_error(e)
        return 1
    print(json.dumps({kind: str(path) for kind, path in files.items()}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
