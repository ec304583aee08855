# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from itertools import groupby
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from wsclab.datastructures import RunConfig
from wsclab.exceptions import ConfigurationError
from wsclab.logging import logger
from wsclab.processpool import run_jobs

from .records import AGGREGATE_FILE, SUMMARY_COLUMNS, SUMMARY_FILE, format_value, write_csv
from .runner import build_stream, run_experiment

AGGREGATED = ("kappa", "avg_final_acc", "forgetting", "plasticity", "rho_mean", "steps", "extra_passes")


def aggregate_columns(keys: Sequence[str]) -> List[str]:
    columns = [*keys, "n_seeds"]
    for name in AGGREGATED:
        columns += [f"{name}_mean", f"{name}_se"]
    return columns


def mean_and_se(values: Iterable[str]) -> Tuple[Optional[float], Optional[float]]:
    """Mean and standard error of the non-empty values; the SE needs at least two."""
    numbers = sorted(float(value) for value in values if value not in ("", None))
    if not numbers:
        return None, None
    n = len(numbers)
    mean = math.fsum(numbers) / n
    if n < 2:
        return mean, None
    variance = math.fsum((x - mean) ** 2 for x in numbers) / (n - 1)
    return mean, math.sqrt(variance / n)


def _sort_key(value: str):
    try:
        return (0, float(value), "")
    except ValueError:
        return (1, 0.0, value)


def aggregate_rows(rows: Iterable[Mapping[str, str]], keys: Sequence[str]) -> List[Dict[str, str]]:
    """One row per distinct key tuple, with mean and standard error of each metric column."""

    def key_of(row: Mapping[str, str]) -> Tuple:
        return tuple(_sort_key(str(row[key])) for key in keys)

    aggregated = []
    for _, group in groupby(sorted(rows, key=key_of), key=key_of):
        group = list(group)
        out = {key: str(group[0][key]) for key in keys}
        out["n_seeds"] = str(len(group))
        for name in AGGREGATED:
            mean, se = mean_and_se(row.get(name, "") for row in group)
            out[f"{name}_mean"] = format_value(mean)
            out[f"{name}_se"] = format_value(se)
        aggregated.append(out)
    return aggregated


def cli_sweep(cfg: RunConfig, out_dir: Optional[Path] = None, parallel: int = 1) -> List[Dict[str, str]]:
    """Every (method, budget, seed) combination; writes summary.csv and aggregate.csv."""
    budgets = cfg.memory.budget_per_class
    if len(budgets) < 2:
        raise ConfigurationError("a sweep needs at least two budgets", field="memory.budget_per_class")
    out_dir = Path(out_dir or cfg.run.output_dir)
    stream = build_stream(cfg)
    jobs = [(cfg, method, budget, seed, out_dir, stream) for method in cfg.run.sweep_methods for budget in budgets for seed in cfg.run.seeds]
    logger.info(f"Sweeping {len(jobs)} runs into {out_dir}")
    records = run_jobs(run_experiment, jobs, parallel)

    rows = [record.summary_row(cfg.run.timing) for record in records]
    write_csv(out_dir / SUMMARY_FILE, SUMMARY_COLUMNS, rows)
    aggregated = aggregate_rows(rows, ("method", "metric", "strategy", "budget_per_class"))
    path = write_csv(out_dir / AGGREGATE_FILE, aggregate_columns(("method", "metric", "strategy", "budget_per_class")), aggregated)
    logger.info(f"aggregate written to {path}")
    return aggregated
