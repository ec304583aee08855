# -*- coding: utf-8 -*-
from __future__ import annotations

import time
from typing import Iterable, Optional, Tuple

import numpy as np

from wsclab.datastructures import NetworkSpec, OptimizerConfig
from wsclab.enum import SamplingMode
from wsclab.exceptions import DomainError
from wsclab.logging import logger
from wsclab.nn import ParameterSet, check_params, init_params
from wsclab.tasks import ReplayBuffer, TaskSpec, TaskStream, build_buffer

from .trainer import EpochCallback, TaskLoop, TaskTrainReport, _class_mask, _emit, _seen_before


def replay_train_task(
    theta: ParameterSet,
    spec: NetworkSpec,
    task: TaskSpec,
    buffer: ReplayBuffer,
    epochs: int,
    opt_cfg: OptimizerConfig,
    rng: np.random.Generator,
    *,
    batch_size: int = 32,
    seen_classes: Optional[Iterable[int]] = None,
    sampling_mode: SamplingMode = SamplingMode.POOLED,
    alpha_override: Optional[float] = None,
    on_epoch: Optional[EpochCallback] = None,
) -> Tuple[ParameterSet, TaskTrainReport]:
    """Finetune on D_t ∪ M: the same minibatch loop as WSC without reset or averaging."""
    if epochs < 0:
        raise DomainError("epochs must be >= 0")
    started = time.perf_counter()
    check_params(theta, spec)
    seen = _seen_before(buffer, seen_classes)
    class_mask = _class_mask(spec, task, seen)
    report = TaskTrainReport(task_id=task.task_id)
    loop = TaskLoop(theta, spec, task, buffer, opt_cfg, rng, batch_size, class_mask, sampling_mode, alpha_override)
    theta = theta.copy()
    for epoch in range(1, epochs + 1):
        theta, loss = loop.run_epoch(theta)
        report.epoch_losses.append(loss)
        report.snapshots.append(theta.flat.copy())
        _emit(on_epoch, task.task_id, epoch, loss, report)
    report.optimizer_steps = loop.steps
    report.wall_clock_seconds = time.perf_counter() - started
    logger.info(f"task {task.task_id}: replay loss {report.final_loss:.4f} after {loop.steps} steps")
    return theta, report


def scratch_train(
    spec: NetworkSpec,
    stream: TaskStream,
    buffer_budget: int,
    upto_task: int,
    epochs: int,
    opt_cfg: OptimizerConfig,
    rng: np.random.Generator,
    *,
    batch_size: int = 32,
    selection_seed: int = 0,
    on_epoch: Optional[EpochCallback] = None,
) -> Tuple[ParameterSet, TaskTrainReport]:
    """Reinitialise and train once on D_t ∪ M_{0:t-1}, with M built at `buffer_budget` per class."""
    if not 0 <= upto_task < len(stream):
        raise DomainError(f"task index {upto_task} outside a stream of {len(stream)} tasks")
    buffer = build_buffer(stream, upto_task, buffer_budget, selection_seed)
    theta = init_params(spec)
    logger.debug(f"scratch training through task {upto_task} on {len(stream[upto_task].train) + len(buffer)} examples")
    return replay_train_task(
        theta,
        spec,
        stream[upto_task],
        buffer,
        epochs,
        opt_cfg,
        rng,
        batch_size=batch_size,
        seen_classes=stream.classes_before(upto_task),
        on_epoch=on_epoch,
    )
