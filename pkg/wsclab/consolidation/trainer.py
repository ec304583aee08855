# -*- coding: utf-8 -*-
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from wsclab.datastructures import ConsolidationSchedule, NetworkSpec, OptimizerConfig, ResetConfig
from wsclab.enum import ImportanceMetric, ResetFrequency, ResetStrategy, SamplingMode
from wsclab.logging import logger
from wsclab.nn import Batch, ParameterSet, Tensor, check_params, class_mask_for, loss_and_grad
from wsclab.optim import MomentState, Optimizer, update_shadow_moments
from wsclab.optim.moments import DEFAULT_BETA1, DEFAULT_BETA2
from wsclab.tasks import ReplayBuffer, TaskSpec, iterate_epoch, sample_hybrid_batch

from .averaging import is_average_epoch, update_running_average
from .dormant import eligible_mask, find_dormant_params
from .importance import ScoringContext, compute_importance
from .reset import apply_reset

EpochCallback = Callable[[dict], None]

PROBE_METRICS = (ImportanceMetric.FISHER, ImportanceMetric.HESSIAN_HUTCHINSON)


@dataclass(frozen=True)
class ResetEvent:
    epoch: int
    step: int
    count: int


@dataclass
class TaskTrainReport:
    task_id: int
    epoch_losses: List[float] = field(default_factory=list)
    reset_events: List[ResetEvent] = field(default_factory=list)
    avg_updates: int = 0
    wall_clock_seconds: float = 0.0
    optimizer_steps: int = 0
    extra_passes: int = 0
    scored_coordinates: int = 0
    finalized: bool = False
    snapshots: List[Tensor] = field(default_factory=list, repr=False)

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else float("nan")

    @property
    def reset_count(self) -> int:
        return sum(event.count for event in self.reset_events)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("snapshots")
        return data


class TaskLoop:
    """Minibatch training over D_t ∪ M for one task.

    Owns the optimizer, the shadow moments (zeroed per task) and the per-step
    drift accumulator; callers drive it epoch by epoch.
    """

    def __init__(
        self,
        theta: ParameterSet,
        spec: NetworkSpec,
        task: TaskSpec,
        buffer: ReplayBuffer,
        opt_cfg: OptimizerConfig,
        rng: np.random.Generator,
        batch_size: int,
        class_mask: np.ndarray,
        sampling_mode: SamplingMode = SamplingMode.POOLED,
        alpha_override: Optional[float] = None,
    ) -> None:
        self.spec = spec
        self.task = task
        self.buffer = buffer
        self.rng = rng
        self.batch_size = batch_size
        self.class_mask = class_mask
        self.sampling_mode = sampling_mode
        self.alpha_override = alpha_override
        self.optimizer = Optimizer(opt_cfg, theta)
        self.moments = MomentState.fresh(theta, DEFAULT_BETA1, DEFAULT_BETA2)
        self.intra_drift = np.zeros(len(theta))

    @property
    def steps(self) -> int:
        return self.optimizer.steps

    def run_epoch(self, theta: ParameterSet, after_step: Optional[Callable[[ParameterSet], ParameterSet]] = None) -> Tuple[ParameterSet, float]:
        loss_sum = 0.0
        seen = 0
        for batch in iterate_epoch(self.task, self.buffer, self.batch_size, self.rng, self.sampling_mode, self.alpha_override):
            loss, grads = loss_and_grad(theta, self.spec, batch, self.class_mask)
            self.moments = update_shadow_moments(self.moments, grads, DEFAULT_BETA1, DEFAULT_BETA2)
            updated = self.optimizer.step(theta, grads)
            self.intra_drift += np.abs(updated.flat - theta.flat)
            theta = updated
            if after_step is not None:
                theta = after_step(theta)
            loss_sum += loss * len(batch)
            seen += len(batch)
        return theta, loss_sum / seen


def _class_mask(spec: NetworkSpec, task: TaskSpec, seen_classes: List[int]) -> np.ndarray:
    return class_mask_for(spec, [*seen_classes, *task.class_ids])


def _seen_before(buffer: ReplayBuffer, seen_classes: Optional[Iterable[int]]) -> List[int]:
    return sorted(seen_classes) if seen_classes is not None else sorted(buffer.stored)


def _emit(on_epoch: Optional[EpochCallback], task_id: int, epoch: int, loss: float, report: TaskTrainReport) -> None:
    logger.debug(f"task {task_id} epoch {epoch}: train loss {loss:.6f}")
    if on_epoch is not None:
        on_epoch(
            {
                "task": task_id,
                "epoch": epoch,
                "train_loss": loss,
                "reset_count": report.reset_count,
                "avg_updates": report.avg_updates,
            }
        )


class _Consolidator:
    """Score-and-reset step of one task, holding what the metrics and strategies need."""

    def __init__(
        self,
        spec: NetworkSpec,
        task: TaskSpec,
        buffer: ReplayBuffer,
        reset_cfg: ResetConfig,
        theta_prev: ParameterSet,
        seen_classes: List[int],
        class_mask: np.ndarray,
        reset_rng: np.random.Generator,
        previous_task_start: Optional[ParameterSet],
        report: TaskTrainReport,
    ) -> None:
        self.spec = spec
        self.task = task
        self.buffer = buffer
        self.cfg = reset_cfg
        self.theta_prev = theta_prev
        self.seen_classes = seen_classes
        self.class_mask = class_mask
        self.rng = reset_rng
        self.previous_task_start = previous_task_start
        self.report = report
        self.eligible = int(eligible_mask(theta_prev, seen_classes if reset_cfg.exclude_unseen_head else None).sum())

    def _probe(self) -> Optional[Batch]:
        if self.cfg.metric not in PROBE_METRICS and self.cfg.strategy is not ResetStrategy.CONTINUAL_BACKPROP:
            return None
        return sample_hybrid_batch(self.task, self.buffer, self.cfg.fisher_samples, rng=self.rng)

    def __call__(self, theta: ParameterSet, loop: TaskLoop, epoch: int) -> ParameterSet:
        probe = self._probe()
        ctx = ScoringContext(
            spec=self.spec,
            theta=theta,
            theta_prev=self.theta_prev,
            moments=loop.moments,
            probe_batch=probe,
            class_mask=self.class_mask,
            intra_drift=loop.intra_drift,
            theta_prev_start=self.previous_task_start,
        )
        importance = compute_importance(self.cfg, ctx)
        reset_idx = find_dormant_params(importance, self.cfg, theta, self.seen_classes)
        theta, count = apply_reset(theta, self.theta_prev, reset_idx, self.cfg, self.rng, self.spec, None if probe is None else probe.inputs)
        cbp_pass = 1 if self.cfg.strategy is ResetStrategy.CONTINUAL_BACKPROP and reset_idx.size else 0
        self.report.extra_passes += importance.extra_passes + cbp_pass
        self.report.scored_coordinates += self.eligible
        self.report.reset_events.append(ResetEvent(epoch=epoch, step=loop.steps, count=count))
        return theta


def _reset_due(schedule: ConsolidationSchedule, epoch: int) -> bool:
    if schedule.reset_frequency is ResetFrequency.EVERY_EPOCH:
        return epoch >= max(schedule.n_warm, 1)
    return epoch == schedule.n_warm


def wsc_train_task(
    theta: ParameterSet,
    spec: NetworkSpec,
    task: TaskSpec,
    buffer: ReplayBuffer,
    schedule: ConsolidationSchedule,
    reset_cfg: ResetConfig,
    opt_cfg: OptimizerConfig,
    rng: np.random.Generator,
    *,
    batch_size: int = 32,
    seen_classes: Optional[Iterable[int]] = None,
    reset_rng: Optional[np.random.Generator] = None,
    previous_task_start: Optional[ParameterSet] = None,
    sampling_mode: SamplingMode = SamplingMode.POOLED,
    alpha_override: Optional[float] = None,
    on_epoch: Optional[EpochCallback] = None,
) -> Tuple[ParameterSet, TaskTrainReport]:
    """Train one task with warm-up, dormant-parameter reset and in-training weight averaging.

    `rng` drives minibatch sampling only; reset strategies and probe batches draw
    from `reset_rng`, so changing the metric never shifts the data order.
    `previous_task_start` (θ when the previous task began) is needed by the
    inter_task_drift metric only.
    """
    started = time.perf_counter()
    task_id = task.task_id
    check_params(theta, spec)
    seen = _seen_before(buffer, seen_classes)
    class_mask = _class_mask(spec, task, seen)
    reset_rng = reset_rng if reset_rng is not None else np.random.default_rng(0)
    report = TaskTrainReport(task_id=task_id)

    consolidating = task_id > 0
    theta_prev = theta.copy() if consolidating else None
    average = theta.copy()
    loop = TaskLoop(theta, spec, task, buffer, opt_cfg, rng, batch_size, class_mask, sampling_mode, alpha_override)
    consolidate = (
        _Consolidator(spec, task, buffer, reset_cfg, theta_prev, seen, class_mask, reset_rng, previous_task_start, report) if consolidating else None
    )
    if consolidating and schedule.n_warm == 0 and schedule.reset_frequency is ResetFrequency.ONCE:
        logger.debug(f"task {task_id}: warm-up of 0 epochs, single reset skipped")

    for epoch in range(1, schedule.n_iter + 1):
        after_step = None
        if consolidate is not None and schedule.reset_frequency is ResetFrequency.EVERY_ITERATION and epoch > schedule.n_warm:
            current_epoch = epoch

            def after_step(params: ParameterSet) -> ParameterSet:
                return consolidate(params, loop, current_epoch)

        theta, loss = loop.run_epoch(theta, after_step)
        if consolidate is not None and _reset_due(schedule, epoch):
            theta = consolidate(theta, loop, epoch)
        if consolidating and schedule.averaging and is_average_epoch(epoch, schedule):
            average, _ = update_running_average(average, theta, epoch, schedule, report.avg_updates)
            report.avg_updates += 1
        report.epoch_losses.append(loss)
        report.snapshots.append(theta.flat.copy())
        _emit(on_epoch, task_id, epoch, loss, report)

    if report.avg_updates > 0:
        theta = average
        report.finalized = True
    elif consolidating and schedule.averaging:
        logger.warning(f"task {task_id}: no running-average update happened, keeping the last iterate")

    report.optimizer_steps = loop.steps
    report.wall_clock_seconds = time.perf_counter() - started
    logger.info(
        f"task {task_id}: loss {report.final_loss:.4f}, {report.reset_count} coordinates reset over "
        f"{len(report.reset_events)} events, {report.avg_updates} average updates"
    )
    return theta, report
