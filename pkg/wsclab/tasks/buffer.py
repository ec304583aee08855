# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Mapping

import numpy as np

from wsclab.exceptions import ContractViolationError, DomainError
from wsclab.logging import logger

from .stream import ExampleSet, TaskSpec, TaskStream


@dataclass(frozen=True)
class ReplayBuffer:
    """Per-class exemplar memory. `stored[c]` keeps class c's exemplars in selection order."""

    per_class_budget: int
    input_dim: int
    selection_seed: int = 0
    stored: Mapping[int, ExampleSet] = field(default_factory=dict)
    tasks_seen: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "stored", dict(sorted(self.stored.items())))

    @classmethod
    def empty(cls, input_dim: int, per_class_budget: int = 0, selection_seed: int = 0) -> "ReplayBuffer":
        return cls(per_class_budget=per_class_budget, input_dim=input_dim, selection_seed=selection_seed)

    def __len__(self) -> int:
        return sum(len(examples) for examples in self.stored.values())

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    @cached_property
    def examples(self) -> ExampleSet:
        return ExampleSet.concat(list(self.stored.values()), self.input_dim)

    def count_by_task(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for examples in self.stored.values():
            for task_id, n in zip(*np.unique(examples.source_task, return_counts=True)):
                counts[int(task_id)] = counts.get(int(task_id), 0) + int(n)
        return dict(sorted(counts.items()))


def select_exemplars(examples: ExampleSet, budget: int, selection_seed: int, class_id: int) -> ExampleSet:
    """Uniform selection without replacement; the draw depends only on (seed, class)."""
    rng = np.random.default_rng([selection_seed, class_id])
    order = rng.permutation(len(examples))[: min(budget, len(examples))]
    return examples.take(order)


def buffer_update(buffer: ReplayBuffer, finished_task: TaskSpec, per_class_budget: int) -> ReplayBuffer:
    if finished_task.task_id in buffer.tasks_seen:
        raise ContractViolationError(f"task {finished_task.task_id} is already stored in the replay buffer")
    if per_class_budget < 0:
        raise DomainError("per-class budget must be non-negative")

    stored = dict(buffer.stored)
    if per_class_budget < buffer.per_class_budget:
        stored = {class_id: examples.take(slice(0, per_class_budget)) for class_id, examples in stored.items()}

    for class_id in finished_task.class_ids:
        members = finished_task.train.of_class(class_id)
        stored[class_id] = select_exemplars(members, per_class_budget, buffer.selection_seed, class_id)

    updated = ReplayBuffer(
        per_class_budget=per_class_budget,
        input_dim=buffer.input_dim,
        selection_seed=buffer.selection_seed,
        stored=stored,
        tasks_seen=buffer.tasks_seen | {finished_task.task_id},
    )
    logger.debug(f"Replay buffer now holds {len(updated)} exemplars over {len(updated.stored)} classes")
    return updated


def build_buffer(stream: TaskStream, upto_task: int, per_class_budget: int, selection_seed: int = 0) -> ReplayBuffer:
    """Buffer as it stands when task `upto_task` begins (tasks 0..upto_task-1 stored)."""
    buffer = ReplayBuffer.empty(stream.input_dim, per_class_budget, selection_seed)
    for task in stream.tasks[:upto_task]:
        buffer = buffer_update(buffer, task, per_class_budget)
    return buffer


def memory_ratio(buffer: ReplayBuffer, stream: TaskStream, upto_task: int) -> float:
    """kappa = |M| / sum of past training set sizes; `upto_task` is the 0-based index of the current task."""
    if upto_task < 1:
        raise DomainError("memory ratio needs at least one finished task (upto_task >= 1)")
    past = sum(len(task.train) for task in stream.tasks[:upto_task])
    return len(buffer) / past


def task_weights(buffer: ReplayBuffer) -> Dict[int, float]:
    total = len(buffer)
    if total == 0:
        raise DomainError("task weights of an empty buffer are undefined")
    return {task_id: count / total for task_id, count in buffer.count_by_task().items()}
