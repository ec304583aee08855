# -*- coding: utf-8 -*-
from __future__ import annotations

import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import orjson

from wsclab.consolidation import Checkpoint, replay_train_task, save_checkpoint, scratch_train, wsc_train_task
from wsclab.datastructures import RunConfig
from wsclab.enum import Method, StreamSource
from wsclab.logging import logger
from wsclab.metrics import (
    AccuracyMatrix,
    average_final_accuracy,
    average_incremental_accuracy,
    drift_record,
    eval_accuracy_row,
    forgetting,
    gradient_alignment,
    plasticity,
    total_cost,
)
from wsclab.nn import init_params
from wsclab.tasks import ReplayBuffer, TaskStream, buffer_update, gen_synthetic_stream, load_idx_stream, load_stream_file, memory_ratio

from .records import CHECKPOINT_FILE, EPOCH_LOG, INCOMPLETE_MARKER, SUMMARY_COLUMNS, SUMMARY_FILE, RunRecord, run_id, write_csv
from .seeding import ALIGNMENT, DATA, RESET, derive_rng

# keys that name where or how often a run happens rather than what it computes
_NON_IDENTITY_KEYS = {"run": ("output_dir", "timing", "seeds", "methods", "method"), "memory": ("budget_per_class",), "ablate": None}


def _mean(entries: List[Dict[str, Any]], key: str) -> Optional[float]:
    values = [entry[key] for entry in entries if entry[key] is not None]
    return float(np.mean(values)) if values else None


def build_stream(cfg: RunConfig) -> TaskStream:
    source = cfg.stream
    if source.source is StreamSource.IDX:
        return load_idx_stream(source.images_path, source.labels_path, source.tasks, source.seed, source.test_fraction)
    if source.source is StreamSource.FILE:
        return load_stream_file(source.path)
    return gen_synthetic_stream(
        seed=source.seed,
        T=source.tasks,
        classes_per_task=source.classes_per_task,
        input_dim=source.input_dim,
        n_train_per_class=source.train_per_class,
        n_test_per_class=source.test_per_class,
        cluster_separation=source.separation,
    )


def identity_echo(cfg: RunConfig) -> Dict[str, Any]:
    echo = cfg.echo()
    for section, keys in _NON_IDENTITY_KEYS.items():
        if keys is None:
            echo.pop(section, None)
            continue
        for key in keys:
            echo[section].pop(key, None)
    return echo


class ExperimentRun:
    """One (method, budget, seed) pass over the task stream.

    Writes `epochs.jsonl` as training proceeds; `execute` adds the checkpoint and
    the record. A run that raises leaves the record flagged incomplete plus an
    INCOMPLETE marker in its directory.
    """

    def __init__(self, cfg: RunConfig, method: Method, budget: int, seed: int, out_dir: Path, stream: Optional[TaskStream] = None) -> None:
        self.cfg = cfg
        self.method = method
        self.budget = budget
        self.seed = seed
        self.stream = stream if stream is not None else build_stream(cfg)
        self.record = RunRecord(
            run_id=run_id(identity_echo(cfg), method.value, budget, seed),
            method=method.value,
            seed=seed,
            budget_per_class=budget,
            config=cfg.echo(),
        )
        self.run_dir = Path(out_dir) / self.record.run_id
        self.spec = cfg.network_spec(self.stream.input_dim, self.stream.num_classes, init_seed=seed)

    def _log_epoch(self, line: dict) -> None:
        with (self.run_dir / EPOCH_LOG).open("ab") as log_file:
            log_file.write(orjson.dumps(line) + b"\n")

    def _train_task(self, t: int, theta, buffer: ReplayBuffer, previous_start):
        cfg = self.cfg
        task = self.stream[t]
        seen = self.stream.classes_before(t)
        rng = derive_rng(self.seed, t, DATA)
        if self.method is Method.WSC:
            return wsc_train_task(
                theta,
                self.spec,
                task,
                buffer,
                cfg.schedule,
                cfg.reset,
                cfg.optim,
                rng,
                batch_size=cfg.run.batch_size,
                seen_classes=seen,
                reset_rng=derive_rng(self.seed, t, RESET),
                previous_task_start=previous_start,
                on_epoch=self._log_epoch,
            )
        if self.method is Method.REPLAY:
            return replay_train_task(
                theta, self.spec, task, buffer, cfg.schedule.n_iter, cfg.optim, rng, batch_size=cfg.run.batch_size, seen_classes=seen, on_epoch=self._log_epoch
            )
        return scratch_train(
            self.spec,
            self.stream,
            self.budget,
            t,
            cfg.schedule.n_iter,
            cfg.optim,
            rng,
            batch_size=cfg.run.batch_size,
            selection_seed=cfg.memory.selection_seed,
            on_epoch=self._log_epoch,
        )

    def execute(self) -> RunRecord:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        for stale in (EPOCH_LOG, INCOMPLETE_MARKER):
            (self.run_dir / stale).unlink(missing_ok=True)
        logger.info(f"run {self.record.run_id}: {self.method.value}, budget {self.budget}/class, seed {self.seed}")
        started = time.perf_counter()
        try:
            theta = self._execute()
        except Exception as exc:
            self._fail(exc)
            raise
        self.record.complete = True
        self.record.cost["wall_clock_seconds"] = time.perf_counter() - started
        save_checkpoint(Checkpoint(theta=theta), self.run_dir / CHECKPOINT_FILE)
        self.record.write(self.run_dir)
        logger.info(f"run {self.record.run_id}: avg final acc {self.record.metrics['avg_final_acc']:.4f}, written to {self.run_dir}")
        return self.record

    def _fail(self, exc: Exception) -> None:
        self.record.error = f"{type(exc).__name__}: {exc}"
        self.record.complete = False
        self.record.write(self.run_dir)
        (self.run_dir / INCOMPLETE_MARKER).write_text(self.record.error + "\n", encoding="utf-8")
        logger.error(f"run {self.record.run_id} failed: {self.record.error}")

    def _execute(self):
        stream = self.stream
        T = len(stream)
        theta = init_params(self.spec)
        buffer = ReplayBuffer.empty(stream.input_dim, self.budget, self.cfg.memory.selection_seed)
        matrix = AccuracyMatrix.empty(T)
        reports = []
        kappas: List[float] = []
        # θ when the previous task began; the initialisation stands in before task 1
        previous_start = theta.copy()
        for t in range(T):
            task = stream[t]
            start = theta.copy()
            if t > 0:
                kappas.append(memory_ratio(buffer, stream, t))
                if not buffer.is_empty:
                    alignment = gradient_alignment(theta, self.spec, task, buffer, self.cfg.run.alignment_probe, derive_rng(self.seed, t, ALIGNMENT))
                    self.record.alignment.append(asdict(alignment))
            theta, report = self._train_task(t, theta, buffer, previous_start)
            previous_start = start
            reports.append(report)
            self.record.tasks.append(report.to_dict())
            self.record.drift.append(asdict(drift_record(t, start, theta, report.snapshots, report.optimizer_steps)))
            buffer = buffer_update(buffer, task, self.budget)
            matrix.set_row(t, eval_accuracy_row(theta, self.spec, stream, t))
            logger.info(f"task {t}: accuracy {matrix.column(t).round(4).tolist()}, incremental {average_incremental_accuracy(matrix):.4f}")
            self.record.accuracy = matrix.to_list()

        later = self.record.drift[1:]
        self.record.metrics = {
            "avg_final_acc": average_final_accuracy(matrix),
            "avg_incremental_acc": average_incremental_accuracy(matrix),
            "forgetting": forgetting(matrix) if T >= 2 else None,
            "plasticity": plasticity(matrix),
            "rho_mean": _mean(self.record.alignment, "rho"),
            "rho_seen_mean": _mean(self.record.alignment, "rho_seen"),
            "hybrid_norm_mean": _mean(self.record.alignment, "hybrid_norm"),
            "kappa": kappas[-1] if kappas else None,
            "inter_task_drift_mean": _mean(later, "inter_task_l2"),
            "per_step_drift_mean": _mean(later, "per_step_l2"),
        }
        self.record.cost = asdict(total_cost(reports))
        return theta


def run_experiment(cfg: RunConfig, method: Method, budget: int, seed: int, out_dir: Path, stream: Optional[TaskStream] = None) -> RunRecord:
    return ExperimentRun(cfg, method, budget, seed, out_dir, stream).execute()


def cli_run(cfg: RunConfig, out_dir: Optional[Path] = None) -> List[RunRecord]:
    """Run `run.method` at the first configured budget for every seed; writes one summary row per seed."""
    out_dir = Path(out_dir or cfg.run.output_dir)
    stream = build_stream(cfg)
    budget = cfg.memory.budget_per_class[0]
    records = [run_experiment(cfg, cfg.run.method, budget, seed, out_dir, stream) for seed in cfg.run.seeds]
    summary = write_csv(out_dir / SUMMARY_FILE, SUMMARY_COLUMNS, [record.summary_row(cfg.run.timing) for record in records])
    logger.info(f"summary written to {summary}")
    return records
