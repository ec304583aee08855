# -*- coding: utf-8 -*-
from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

import orjson

from wsclab.exceptions import ReportError

SUMMARY_COLUMNS = (
    "run_id",
    "method",
    "metric",
    "strategy",
    "budget_per_class",
    "kappa",
    "seed",
    "avg_final_acc",
    "forgetting",
    "plasticity",
    "rho_mean",
    "steps",
    "extra_passes",
    "wall_clock_s",
)
ABLATION_COLUMNS = ("suite", "variant", *SUMMARY_COLUMNS)

EPOCH_LOG = "epochs.jsonl"
RECORD_FILE = "record.json"
CHECKPOINT_FILE = "final.wsck"
INCOMPLETE_MARKER = "INCOMPLETE"
SUMMARY_FILE = "summary.csv"
AGGREGATE_FILE = "aggregate.csv"
ABLATION_FILE = "ablation.csv"
ABLATION_AGGREGATE_FILE = "ablation_aggregate.csv"


def canonical_json(data: Any) -> bytes:
    return orjson.dumps(data, option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)


def run_id(config_echo: Mapping[str, Any], method: str, budget: int, seed: int) -> str:
    """First 16 hex digits of SHA-256 over the canonical JSON of the run's identity."""
    payload = canonical_json({"config": config_echo, "method": method, "budget_per_class": budget, "seed": seed})
    return hashlib.sha256(payload).hexdigest()[:16]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


@dataclass
class RunRecord:
    run_id: str
    method: str
    seed: int
    budget_per_class: int
    config: Dict[str, Any]
    complete: bool = False
    tasks: List[Dict[str, Any]] = field(default_factory=list)
    accuracy: List[List[Optional[float]]] = field(default_factory=list)
    metrics: Dict[str, Optional[float]] = field(default_factory=dict)
    alignment: List[Dict[str, Any]] = field(default_factory=list)
    drift: List[Dict[str, Any]] = field(default_factory=list)
    cost: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "method": self.method,
            "seed": self.seed,
            "budget_per_class": self.budget_per_class,
            "complete": self.complete,
            "config": self.config,
            "tasks": self.tasks,
            "accuracy": self.accuracy,
            "metrics": self.metrics,
            "alignment": self.alignment,
            "drift": self.drift,
            "cost": self.cost,
            "error": self.error,
        }

    def summary_row(self, timing: bool = False) -> Dict[str, str]:
        reset = self.config.get("reset", {})
        row = {
            "run_id": self.run_id,
            "method": self.method,
            "metric": reset.get("metric", "") if self.method == "wsc" else "",
            "strategy": reset.get("strategy", "") if self.method == "wsc" else "",
            "budget_per_class": self.budget_per_class,
            "kappa": self.metrics.get("kappa"),
            "seed": self.seed,
            "avg_final_acc": self.metrics.get("avg_final_acc"),
            "forgetting": self.metrics.get("forgetting"),
            "plasticity": self.metrics.get("plasticity"),
            "rho_mean": self.metrics.get("rho_mean"),
            "steps": self.cost.get("optimizer_steps"),
            "extra_passes": self.cost.get("extra_forward_backward_passes"),
            "wall_clock_s": self.cost.get("wall_clock_seconds") if timing else None,
        }
        return {key: format_value(value) for key, value in row.items()}

    def write(self, run_dir: Path) -> Path:
        path = run_dir / RECORD_FILE
        path.write_bytes(orjson.dumps(self.to_dict(), option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY))
        return path


def write_csv(path: Path, columns: Iterable[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    columns = list(columns)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as csv_file:
        writer = csv.DictWriter(csv_file, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: row.get(key, "") for key in columns})
    return path


def read_csv(path: Path, required: Iterable[str] = ()) -> List[Dict[str, str]]:
    with path.open("r", encoding="utf-8", newline="") as csv_file:
        reader = csv.DictReader(csv_file)
        missing = [column for column in required if column not in (reader.fieldnames or ())]
        if missing:
            raise ReportError(f"missing columns {', '.join(missing)}", path=str(path))
        return list(reader)
