# -*- coding: utf-8 -*-
from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

from wsclab.args_parser import ArgsConfig
from wsclab.datastructures import RunConfig, load_run_config
from wsclab.exceptions import BaseException, ConfigurationError
from wsclab.harness import build_stream, cli_ablate, cli_report, cli_run, cli_sweep
from wsclab.logging import logger
from wsclab.tasks import save_stream_file


def _load(args: ArgsConfig) -> RunConfig:
    if args.config is None:
        return RunConfig().replace(args.overrides())
    return load_run_config(args.config, overrides=args.overrides())


def gen_data(args: ArgsConfig) -> int:
    cfg = _load(args)
    path = save_stream_file(build_stream(cfg), args.out)
    logger.info(f"stream written to {path}")
    return 0


def run(args: ArgsConfig) -> int:
    cli_run(_load(args), Path(args.out) if args.out else None)
    return 0


def sweep(args: ArgsConfig) -> int:
    cli_sweep(_load(args), Path(args.out) if args.out else None, args.parallel)
    return 0


def ablate(args: ArgsConfig) -> int:
    cli_ablate(_load(args), Path(args.out) if args.out else None, args.parallel)
    return 0


def report(args: ArgsConfig) -> int:
    if args.results_dir is None:
        raise ConfigurationError("a results directory is required", field="results_dir")
    cli_report(Path(args.results_dir))
    return 0


COMMANDS = {
    "gen-data": gen_data,
    "run": run,
    "sweep": sweep,
    "ablate": ablate,
    "report": report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = ArgsConfig(argv)
    try:
        return COMMANDS[args.command](args)
    except BaseException as exc:
        logger.error(f"{exc.error_code.value}: {exc}")
        return exc.exit_code
