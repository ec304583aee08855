# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from typing import Iterator, Optional

import numpy as np

from wsclab.enum import SamplingMode
from wsclab.exceptions import DomainError
from wsclab.nn import Batch

from .buffer import ReplayBuffer, task_weights
from .stream import ExampleSet, TaskSpec


def pooled_examples(current: TaskSpec, buffer: ReplayBuffer) -> ExampleSet:
    """D_t followed by the buffer contents."""
    return ExampleSet.concat([current.train, buffer.examples], current.train.input_dim)


def realized_alpha(current: TaskSpec, buffer: ReplayBuffer) -> float:
    return len(current.train) / (len(current.train) + len(buffer))


def _check(current: TaskSpec, batch_size: int) -> None:
    if batch_size < 1:
        raise DomainError("batch size must be >= 1")
    if len(current.train) == 0:
        raise DomainError(f"task {current.task_id} has no training examples")


def sample_hybrid_batch(
    current: TaskSpec,
    buffer: ReplayBuffer,
    batch_size: int,
    mode: SamplingMode = SamplingMode.POOLED,
    alpha_override: Optional[float] = None,
    *,
    rng: np.random.Generator,
) -> Batch:
    """Draw `batch_size` examples i.i.d. from the hybrid training distribution.

    pooled: uniform over the multiset D_t ∪ M.
    explicit: each slot comes from D_t with probability `alpha_override`, otherwise
    from M, picking a past task by its weight and then a stored example of it.
    """
    _check(current, batch_size)
    if mode is SamplingMode.POOLED:
        pool = pooled_examples(current, buffer)
        return pool.take(rng.integers(0, len(pool), size=batch_size)).as_batch()

    alpha = realized_alpha(current, buffer) if alpha_override is None else alpha_override
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha_override must lie in [0, 1]")
    if buffer.is_empty and alpha < 1.0:
        raise DomainError("explicit sampling with alpha < 1 needs a non-empty buffer")

    from_current = rng.random(batch_size) < alpha
    memory = buffer.examples
    index = np.empty(batch_size, dtype=np.int64)
    n_current = int(from_current.sum())
    index[from_current] = rng.integers(0, len(current.train), size=n_current)
    n_memory = batch_size - n_current
    if n_memory:
        weights = task_weights(buffer)
        task_ids = np.array(list(weights), dtype=np.int64)
        chosen = rng.choice(task_ids, size=n_memory, p=np.array(list(weights.values())))
        slots = np.empty(n_memory, dtype=np.int64)
        for task_id in task_ids:
            where = chosen == task_id
            members = np.flatnonzero(memory.source_task == task_id)
            slots[where] = members[rng.integers(0, members.shape[0], size=int(where.sum()))]
        index[~from_current] = len(current.train) + slots
    pool = pooled_examples(current, buffer)
    return pool.take(index).as_batch()


def steps_per_epoch(current: TaskSpec, buffer: ReplayBuffer, batch_size: int) -> int:
    return math.ceil((len(current.train) + len(buffer)) / batch_size)


def iterate_epoch(
    current: TaskSpec,
    buffer: ReplayBuffer,
    batch_size: int,
    rng: np.random.Generator,
    mode: SamplingMode = SamplingMode.POOLED,
    alpha_override: Optional[float] = None,
) -> Iterator[Batch]:
    """One epoch of minibatches.

    Pooled mode shuffles D_t ∪ M and walks it without replacement; explicit mode
    issues the same number of independent `sample_hybrid_batch` draws.
    """
    _check(current, batch_size)
    if mode is SamplingMode.POOLED:
        pool = pooled_examples(current, buffer)
        order = rng.permutation(len(pool))
        for start in range(0, len(pool), batch_size):
            yield pool.take(order[start : start + batch_size]).as_batch()
        return
    for _ in range(steps_per_epoch(current, buffer, batch_size)):
        yield sample_hybrid_batch(current, buffer, batch_size, mode, alpha_override, rng=rng)
