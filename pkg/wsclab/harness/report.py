# -*- coding: utf-8 -*-
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence

from wsclab.exceptions import ReportError
from wsclab.logging import logger

from .records import ABLATION_AGGREGATE_FILE, AGGREGATE_FILE, read_csv

REPORT_FILE = "report.md"
_RESULT_COLUMNS = ("budget_per_class", "n_seeds", "avg_final_acc_mean", "avg_final_acc_se", "steps_mean", "extra_passes_mean")


def _budget_key(value: str) -> float:
    return float(value) if value else -1.0


def format_cell(mean: str, se: str) -> str:
    if mean == "":
        return "-"
    text = f"{100 * float(mean):.2f}"
    return f"{text} ± {100 * float(se):.2f}" if se else text


def markdown_table(header: Sequence[str], body: Sequence[Sequence[str]]) -> List[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in body]
    return lines


def accuracy_table(rows: List[Dict[str, str]], label_columns: Sequence[str]) -> List[str]:
    """Rows are methods (or variants), columns are memory budgets, cells are accuracy in percent."""
    budgets = sorted({row["budget_per_class"] for row in rows}, key=_budget_key)
    labels: List[tuple] = []
    cells: Dict[tuple, Dict[str, str]] = {}
    for row in rows:
        label = tuple(row[column] for column in label_columns)
        if label not in cells:
            labels.append(label)
            cells[label] = {}
        cells[label][row["budget_per_class"]] = format_cell(row["avg_final_acc_mean"], row["avg_final_acc_se"])
    header = [*label_columns, *(f"M={budget}" for budget in budgets)]
    body = [[*label, *(cells[label].get(budget, "-") for budget in budgets)] for label in labels]
    return markdown_table(header, body)


def cost_listing(rows: List[Dict[str, str]], label_columns: Sequence[str]) -> List[str]:
    """Accuracy against optimizer steps and scoring passes, one line per (label, budget)."""
    header = [*label_columns, "budget_per_class", "avg_final_acc", "steps", "extra_passes"]
    body = []
    for row in sorted(rows, key=lambda r: (tuple(r[c] for c in label_columns), _budget_key(r["budget_per_class"]))):
        body.append(
            [
                *(row[column] for column in label_columns),
                row["budget_per_class"],
                format_cell(row["avg_final_acc_mean"], ""),
                row["steps_mean"] or "-",
                row["extra_passes_mean"] or "-",
            ]
        )
    return markdown_table(header, body)


def _method_label(row: Dict[str, str]) -> str:
    if row["method"] != "wsc":
        return row["method"]
    return f"wsc ({row['metric']}, {row['strategy']})"


def cli_report(results_dir: Path) -> Path:
    """Render the aggregate CSVs under `results_dir` into report.md."""
    results_dir = Path(results_dir)
    if not results_dir.is_dir():
        raise ReportError("results directory does not exist", path=str(results_dir))
    aggregate = results_dir / AGGREGATE_FILE
    ablation = results_dir / ABLATION_AGGREGATE_FILE
    if not aggregate.exists() and not ablation.exists():
        raise ReportError(f"no {AGGREGATE_FILE} or {ABLATION_AGGREGATE_FILE} found", path=str(results_dir))

    lines = ["# Results", ""]
    if aggregate.exists():
        rows = read_csv(aggregate, ("method", "metric", "strategy", *_RESULT_COLUMNS))
        for row in rows:
            row["label"] = _method_label(row)
        lines += ["## Average final accuracy by memory budget", ""]
        lines += accuracy_table(rows, ("label",))
        lines += ["", "## Accuracy against training cost", ""]
        lines += cost_listing(rows, ("label",))
        lines.append("")
    if ablation.exists():
        rows = read_csv(ablation, ("suite", "variant", *_RESULT_COLUMNS))
        for suite in sorted({row["suite"] for row in rows}):
            lines += [f"## Ablation: {suite}", ""]
            lines += accuracy_table([row for row in rows if row["suite"] == suite], ("variant",))
            lines.append("")
    path = results_dir / REPORT_FILE
    path.write_text("\n".join(lines), encoding="utf-8")
    logger.info(f"report written to {path}")
    return path
