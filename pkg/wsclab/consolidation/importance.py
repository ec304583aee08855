# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from wsclab.datastructures import NetworkSpec, ResetConfig
from wsclab.enum import ImportanceMetric
from wsclab.exceptions import ConfigurationError, DomainError
from wsclab.nn import Batch, ParameterSet, Tensor, loss_and_grad, per_sample_grads
from wsclab.nn.network import ClassMask
from wsclab.nn.params import check_flat
from wsclab.optim import MomentState, bias_corrected, raw_moments


@dataclass(frozen=True)
class ImportanceVector:
    scores: Tensor
    metric_used: ImportanceMetric
    extra_passes: int = 0

    def __len__(self) -> int:
        return self.scores.shape[0]


def _moments(moments: MomentState, corrected: bool):
    if moments.step_count < 1:
        raise DomainError("importance from a fresh moment state is undefined")
    return bias_corrected(moments) if corrected else raw_moments(moments)


def score_moment(moments: MomentState, bias_corrected: bool = True) -> ImportanceVector:
    """S = |m̂| * v̂: large only for coordinates whose gradients are both consistent and energetic."""
    m_hat, v_hat = _moments(moments, bias_corrected)
    return ImportanceVector(np.abs(m_hat) * v_hat, ImportanceMetric.MOMENT)


def score_first_moment(moments: MomentState, bias_corrected: bool = True) -> ImportanceVector:
    m_hat, _ = _moments(moments, bias_corrected)
    return ImportanceVector(np.abs(m_hat), ImportanceMetric.FIRST_MOMENT_ONLY)


def score_second_moment(moments: MomentState, bias_corrected: bool = True) -> ImportanceVector:
    _, v_hat = _moments(moments, bias_corrected)
    return ImportanceVector(v_hat.copy(), ImportanceMetric.SECOND_MOMENT_ONLY)


def score_param_drift(theta: ParameterSet, theta_prev: ParameterSet) -> ImportanceVector:
    theta.check_layout(theta_prev, "current and previous-task parameters")
    return ImportanceVector(np.abs(theta.flat - theta_prev.flat), ImportanceMetric.PARAM_DRIFT)


def score_intra_task_drift(accumulated: Tensor, params: ParameterSet) -> ImportanceVector:
    """Sum over optimizer steps of |θ^(i+1) - θ^(i)|, accumulated by the training loop."""
    check_flat(accumulated, params, "accumulated drift")
    return ImportanceVector(np.asarray(accumulated, dtype=np.float64).copy(), ImportanceMetric.INTRA_TASK_DRIFT)


def score_inter_task_drift(theta_prev: ParameterSet, theta_prev_start: ParameterSet) -> ImportanceVector:
    """How far each coordinate moved while the previous task was learned."""
    theta_prev.check_layout(theta_prev_start, "previous-task parameters")
    return ImportanceVector(np.abs(theta_prev.flat - theta_prev_start.flat), ImportanceMetric.INTER_TASK_DRIFT)


def score_fisher(
    params: ParameterSet,
    spec: NetworkSpec,
    sample_batches: Union[Batch, Sequence[Batch]],
    class_mask: ClassMask = None,
) -> ImportanceVector:
    """Empirical Fisher diagonal: mean over samples of the squared log-likelihood gradient."""
    batches = [sample_batches] if isinstance(sample_batches, Batch) else list(sample_batches)
    total = np.zeros(len(params))
    count = 0
    for batch in batches:
        if len(batch) == 0:
            continue
        grads = per_sample_grads(params, spec, batch, class_mask)
        total += np.einsum("bp,bp->p", grads, grads)
        count += len(batch)
    if count == 0:
        raise DomainError("Fisher diagonal needs at least one sample")
    return ImportanceVector(total / count, ImportanceMetric.FISHER, extra_passes=len(batches))


def hutchinson_diagonal(
    grad_fn: Callable[[Tensor], Tensor],
    theta: Tensor,
    num_probes: int,
    probe_seed: int,
    epsilon: Optional[float] = None,
) -> Tensor:
    """Hutchinson estimate of diag(H) with Rademacher probes.

    Hessian-vector products come from central differences of `grad_fn`:
    Hv ≈ (g(θ+εv) - g(θ-εv)) / 2ε with ε = 1e-4 * (1 + ||θ||∞).
    """
    if num_probes < 1:
        raise DomainError("Hutchinson estimation needs at least one probe")
    theta = np.asarray(theta, dtype=np.float64)
    if epsilon is None:
        epsilon = 1e-4 * (1.0 + float(np.max(np.abs(theta), initial=0.0)))
    rng = np.random.default_rng(probe_seed)
    estimate = np.zeros_like(theta)
    for _ in range(num_probes):
        v = rng.integers(0, 2, size=theta.shape[0]).astype(np.float64) * 2.0 - 1.0
        hv = (grad_fn(theta + epsilon * v) - grad_fn(theta - epsilon * v)) / (2.0 * epsilon)
        estimate += v * hv
    return estimate / num_probes


def score_hessian_hutchinson(
    params: ParameterSet,
    spec: NetworkSpec,
    batch: Batch,
    Kp: int,
    probe_seed: int,
    class_mask: ClassMask = None,
) -> ImportanceVector:
    def grad_fn(flat: Tensor) -> Tensor:
        _, grads = loss_and_grad(params.with_flat(flat), spec, batch, class_mask)
        return grads.flat

    diagonal = hutchinson_diagonal(grad_fn, params.flat, Kp, probe_seed)
    return ImportanceVector(np.abs(diagonal), ImportanceMetric.HESSIAN_HUTCHINSON, extra_passes=2 * Kp)


@dataclass
class ScoringContext:
    """Whatever the configured metric may need at reset time."""

    spec: NetworkSpec
    theta: ParameterSet
    theta_prev: Optional[ParameterSet] = None
    moments: Optional[MomentState] = None
    probe_batch: Optional[Batch] = None
    class_mask: ClassMask = None
    intra_drift: Optional[Tensor] = None
    theta_prev_start: Optional[ParameterSet] = None


def _require(value, what: str, metric: ImportanceMetric):
    if value is None:
        raise DomainError(f"metric '{metric.value}' needs {what}")
    return value


def compute_importance(cfg: ResetConfig, ctx: ScoringContext) -> ImportanceVector:
    metric = cfg.metric
    if metric is ImportanceMetric.MOMENT:
        return score_moment(_require(ctx.moments, "moments", metric), cfg.bias_corrected)
    if metric is ImportanceMetric.FIRST_MOMENT_ONLY:
        return score_first_moment(_require(ctx.moments, "moments", metric), cfg.bias_corrected)
    if metric is ImportanceMetric.SECOND_MOMENT_ONLY:
        return score_second_moment(_require(ctx.moments, "moments", metric), cfg.bias_corrected)
    if metric is ImportanceMetric.PARAM_DRIFT:
        return score_param_drift(ctx.theta, _require(ctx.theta_prev, "previous-task parameters", metric))
    if metric is ImportanceMetric.FISHER:
        return score_fisher(ctx.theta, ctx.spec, _require(ctx.probe_batch, "a probe batch", metric), ctx.class_mask)
    if metric is ImportanceMetric.HESSIAN_HUTCHINSON:
        batch = _require(ctx.probe_batch, "a probe batch", metric)
        return score_hessian_hutchinson(ctx.theta, ctx.spec, batch, cfg.hutchinson_probes, cfg.probe_seed, ctx.class_mask)
    if metric is ImportanceMetric.INTRA_TASK_DRIFT:
        return score_intra_task_drift(_require(ctx.intra_drift, "accumulated step drift", metric), ctx.theta)
    if metric is ImportanceMetric.INTER_TASK_DRIFT:
        theta_prev = _require(ctx.theta_prev, "previous-task parameters", metric)
        return score_inter_task_drift(theta_prev, _require(ctx.theta_prev_start, "the previous task's starting parameters", metric))
    raise ConfigurationError(f"unknown importance metric {metric!r}", field="reset.metric")
