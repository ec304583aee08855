# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from wsclab.datastructures import RunConfig
from wsclab.enum import ImportanceMetric, Method, ResetFrequency, ResetStrategy
from wsclab.exceptions import ConfigurationError
from wsclab.logging import logger
from wsclab.processpool import run_jobs

from .records import ABLATION_AGGREGATE_FILE, ABLATION_COLUMNS, ABLATION_FILE, run_id, write_csv
from .runner import build_stream, identity_echo, run_experiment
from .sweep import aggregate_columns, aggregate_rows


@dataclass(frozen=True)
class Variant:
    suite: str
    name: str
    method: Method
    changes: Mapping[str, Any] = field(default_factory=dict)

    def config(self, base: RunConfig) -> RunConfig:
        return base.replace(self.changes) if self.changes else base


def component_suite() -> List[Variant]:
    """Replay, each of the two mechanisms alone, and both together."""
    return [
        Variant("component", "replay", Method.REPLAY),
        Variant("component", "wo_reset", Method.WSC, {"reset.retain": 1.0, "schedule.averaging": True}),
        Variant("component", "wo_avg", Method.WSC, {"schedule.averaging": False}),
        Variant("component", "wsc", Method.WSC, {"schedule.averaging": True}),
    ]


def metric_suite() -> List[Variant]:
    return [Variant("metric", metric.value, Method.WSC, {"reset.metric": metric.value}) for metric in ImportanceMetric]


def strategy_suite() -> List[Variant]:
    return [Variant("strategy", strategy.value, Method.WSC, {"reset.strategy": strategy.value}) for strategy in ResetStrategy]


def frequency_suite() -> List[Variant]:
    return [Variant("frequency", frequency.value, Method.WSC, {"schedule.reset_frequency": frequency.value}) for frequency in ResetFrequency]


def retain_suite(grid) -> List[Variant]:
    return [Variant("retain", f"q={q:g}", Method.WSC, {"reset.retain": float(q)}) for q in grid]


def build_variants(cfg: RunConfig) -> List[Variant]:
    suites = {
        "component": component_suite,
        "metric": metric_suite,
        "strategy": strategy_suite,
        "frequency": frequency_suite,
        "retain": lambda: retain_suite(cfg.ablate.retain_grid),
    }
    variants: List[Variant] = []
    for name in cfg.ablate.suites:
        if name not in suites:
            raise ConfigurationError(f"unknown ablation suite '{name}'", field="ablate.suites")
        variants.extend(suites[name]())
    return variants


def cli_ablate(cfg: RunConfig, out_dir: Optional[Path] = None, parallel: int = 1) -> List[Dict[str, str]]:
    """Run every configured ablation variant over the budgets and seeds, sharing one stream."""
    out_dir = Path(out_dir or cfg.run.output_dir)
    stream = build_stream(cfg)
    variants = build_variants(cfg)
    # variants that resolve to the same configuration share one run directory, so each runs once
    jobs: Dict[str, tuple] = {}
    labels = []
    for variant in variants:
        variant_cfg = variant.config(cfg)
        identity = identity_echo(variant_cfg)
        for budget in cfg.memory.budget_per_class:
            for seed in cfg.run.seeds:
                key = run_id(identity, variant.method.value, budget, seed)
                jobs.setdefault(key, (variant_cfg, variant.method, budget, seed, out_dir, stream))
                labels.append((variant, key))
    logger.info(f"Ablating {len(variants)} variants over {len(jobs)} distinct runs")
    records = dict(zip(jobs, run_jobs(run_experiment, list(jobs.values()), parallel)))

    rows = []
    for variant, key in labels:
        record = records[key]
        row = record.summary_row(cfg.run.timing)
        row.update(suite=variant.suite, variant=variant.name)
        rows.append(row)
    write_csv(out_dir / ABLATION_FILE, ABLATION_COLUMNS, rows)
    keys = ("suite", "variant", "method", "budget_per_class")
    aggregated = aggregate_rows(rows, keys)
    path = write_csv(out_dir / ABLATION_AGGREGATE_FILE, aggregate_columns(keys), aggregated)
    logger.info(f"ablation aggregate written to {path}")
    return aggregated
