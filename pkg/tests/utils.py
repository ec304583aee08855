from typing import Callable, Optional

import numpy as np

from wsclab.datastructures import NetworkSpec
from wsclab.nn import Batch, ParameterSet, init_params, loss_and_grad


def random_params(spec: NetworkSpec, seed: int, scale: float = 0.5) -> ParameterSet:
    """Same layout as init_params but with every coordinate (biases included) drawn at random."""
    params = init_params(spec)
    return params.with_flat(np.random.default_rng(seed).normal(0.0, scale, size=len(params)))


def random_batch(spec: NetworkSpec, size: int, seed: int, classes: Optional[list] = None) -> Batch:
    rng = np.random.default_rng(seed)
    classes = list(range(spec.num_classes)) if classes is None else classes
    return Batch.of(rng.normal(size=(size, spec.input_dim)), rng.choice(classes, size=size))


def numeric_grad(fn: Callable[[np.ndarray], float], theta: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(theta)
    for i in range(theta.shape[0]):
        step = np.zeros_like(theta)
        step[i] = eps
        grad[i] = (fn(theta + step) - fn(theta - step)) / (2 * eps)
    return grad


def loss_fn(params: ParameterSet, spec: NetworkSpec, batch: Batch, class_mask=None) -> Callable[[np.ndarray], float]:
    def fn(flat: np.ndarray) -> float:
        loss, _ = loss_and_grad(params.with_flat(flat), spec, batch, class_mask)
        return loss

    return fn


def dense_hessian_diagonal(params: ParameterSet, spec: NetworkSpec, batch: Batch, eps: float = 1e-4) -> np.ndarray:
    """Diagonal of the Hessian from central differences of the analytic gradient, one coordinate at a time."""
    diagonal = np.zeros(len(params))
    for i in range(len(params)):
        step = np.zeros(len(params))
        step[i] = eps
        _, plus = loss_and_grad(params.with_flat(params.flat + step), spec, batch)
        _, minus = loss_and_grad(params.with_flat(params.flat - step), spec, batch)
        diagonal[i] = (plus.flat[i] - minus.flat[i]) / (2 * eps)
    return diagonal


def brute_force_dormant(scores: np.ndarray, eligible: np.ndarray, retain: float) -> np.ndarray:
    """Full sort by (score, index) over the eligible coordinates, keeping the lowest floor((1-q)n)."""
    candidates = [i for i in range(scores.shape[0]) if eligible[i]]
    k = int(np.floor((1.0 - retain) * len(candidates) + 1e-9))
    ranked = sorted(candidates, key=lambda i: (scores[i], i))
    return np.array(sorted(ranked[:k]), dtype=np.int64)
