# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from wsclab.consolidation.dormant import eligible_mask
from wsclab.datastructures import NetworkSpec
from wsclab.exceptions import DomainError
from wsclab.logging import logger
from wsclab.nn import ParameterSet, class_mask_for, loss_and_grad
from wsclab.nn.network import ClassMask
from wsclab.tasks import ExampleSet, ReplayBuffer, TaskSpec, realized_alpha

ZERO_NORM = 1e-12


@dataclass(frozen=True)
class AlignmentRecord:
    task: int
    rho: float
    norm_new: float
    norm_past: float
    degenerate: bool = False
    # cosine over coordinates outside the head rows of classes not yet trained
    rho_seen: float = 0.0
    alpha: float = 1.0
    # ‖α g_new + (1 − α) g_past‖ at the realized α of the pooled batch
    hybrid_norm: float = 0.0


def cosine_alignment(g_new: np.ndarray, g_past: np.ndarray) -> tuple[float, float, float, bool]:
    norm_new = float(np.linalg.norm(g_new))
    norm_past = float(np.linalg.norm(g_past))
    if norm_new < ZERO_NORM or norm_past < ZERO_NORM:
        return 0.0, norm_new, norm_past, True
    rho = float(np.dot(g_new, g_past) / (norm_new * norm_past))
    return float(np.clip(rho, -1.0, 1.0)), norm_new, norm_past, False


def _probe(examples: ExampleSet, probe_size: int, rng: np.random.Generator) -> ExampleSet:
    if len(examples) <= probe_size:
        return examples
    return examples.take(np.sort(rng.choice(len(examples), size=probe_size, replace=False)))


def gradient_alignment(
    theta: ParameterSet,
    spec: NetworkSpec,
    task: TaskSpec,
    buffer: ReplayBuffer,
    probe_size: int,
    rng: Optional[np.random.Generator] = None,
    class_mask: ClassMask = None,
) -> AlignmentRecord:
    """Cosine between the mean gradient on a D_t probe and the mean gradient on a memory probe.

    Probes draw without replacement from the training splits; the mask defaults
    to every class seen through task t. The record also carries the cosine over
    the coordinates trained before task t and the norm of the hybrid update the
    pooled batch would take.
    """
    if buffer.is_empty:
        raise DomainError("gradient alignment needs a non-empty replay buffer")
    if probe_size < 1:
        raise DomainError("probe size must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    if class_mask is None:
        class_mask = class_mask_for(spec, [*buffer.stored, *task.class_ids])
    _, g_new = loss_and_grad(theta, spec, _probe(task.train, probe_size, rng).as_batch(), class_mask)
    _, g_past = loss_and_grad(theta, spec, _probe(buffer.examples, probe_size, rng).as_batch(), class_mask)
    rho, norm_new, norm_past, degenerate = cosine_alignment(g_new.flat, g_past.flat)
    if degenerate:
        logger.warning(f"task {task.task_id}: zero-norm mean gradient, alignment reported as 0")
    trained = eligible_mask(theta, buffer.stored)
    rho_seen = cosine_alignment(g_new.flat[trained], g_past.flat[trained])[0]
    alpha = realized_alpha(task, buffer)
    hybrid_norm = float(np.linalg.norm(alpha * g_new.flat + (1.0 - alpha) * g_past.flat))
    return AlignmentRecord(
        task=task.task_id,
        rho=rho,
        norm_new=norm_new,
        norm_past=norm_past,
        degenerate=degenerate,
        rho_seen=rho_seen,
        alpha=alpha,
        hybrid_norm=hybrid_norm,
    )
