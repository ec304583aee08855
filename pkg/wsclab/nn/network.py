# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from wsclab.datastructures import NetworkSpec
from wsclab.exceptions import ConfigurationError, DomainError, ShapeError

from .batch import Batch
from .params import ParameterSet, Segment, Tensor, build_segments

HEAD = "head"
ClassMask = Optional[npt.NDArray[np.bool_]]


def layer_names(spec: NetworkSpec) -> List[str]:
    depth = len(spec.hidden_dims)
    return [f"fc{i}" for i in range(depth)] + [HEAD]


def param_segments(spec: NetworkSpec) -> Tuple[Segment, ...]:
    dims = spec.layer_dims
    shapes: list[tuple[str, tuple[int, ...]]] = []
    for name, fan_in, fan_out in zip(layer_names(spec), dims[:-1], dims[1:]):
        shapes.append((f"{name}.weight", (fan_out, fan_in)))
        shapes.append((f"{name}.bias", (fan_out,)))
    return build_segments(shapes)


def init_bound(fan_in: int) -> float:
    """Half-width of the kaiming-uniform interval for a ReLU layer."""
    return math.sqrt(6.0 / fan_in)


def init_std(fan_in: int) -> float:
    return math.sqrt(2.0 / fan_in)


def _validate_spec(spec: NetworkSpec) -> None:
    if spec.input_dim < 1 or spec.num_classes < 2 or any(w < 1 for w in spec.hidden_dims):
        raise ConfigurationError(f"invalid network dimensions {spec.layer_dims}", field="network")


def draw_segment(segment: Segment, rng: np.random.Generator) -> Tensor:
    """Fresh init-scheme values for one segment, flattened: uniform weights, zero biases."""
    if segment.name.endswith(".bias"):
        return np.zeros(segment.size)
    fan_in = segment.shape[1]
    bound = init_bound(fan_in)
    return rng.uniform(-bound, bound, size=segment.size)


def init_params(spec: NetworkSpec) -> ParameterSet:
    _validate_spec(spec)
    rng = np.random.default_rng(spec.init_seed)
    segments = param_segments(spec)
    flat = np.concatenate([draw_segment(segment, rng) for segment in segments])
    return ParameterSet(segments, flat)


def coordinate_init_std(params: ParameterSet) -> Tensor:
    """Per-coordinate init-scheme std; biases take their layer's weight std."""
    std = np.empty(len(params))
    for segment in params:
        layer = segment.name.rsplit(".", 1)[0]
        fan_in = params.segment(f"{layer}.weight").shape[1]
        std[segment.slice] = init_std(fan_in)
    return std


def check_params(params: ParameterSet, spec: NetworkSpec) -> None:
    if params.segments != param_segments(spec):
        raise ShapeError(f"{params!r} does not match network layout {spec.layer_dims}")


def _check_inputs(inputs: Tensor, spec: NetworkSpec) -> None:
    if inputs.ndim != 2 or inputs.shape[1] != spec.input_dim:
        raise ShapeError(f"inputs of shape {inputs.shape} do not match input_dim={spec.input_dim}")


def _forward_cache(params: ParameterSet, spec: NetworkSpec, inputs: Tensor) -> Tuple[Tensor, List[Tensor], List[Tensor]]:
    activations = [inputs]
    preactivations = []
    hidden = inputs
    names = layer_names(spec)
    for name in names[:-1]:
        z = hidden @ params.view(f"{name}.weight").T + params.view(f"{name}.bias")
        preactivations.append(z)
        hidden = np.maximum(z, 0.0)
        activations.append(hidden)
    logits = hidden @ params.view(f"{HEAD}.weight").T + params.view(f"{HEAD}.bias")
    if not np.all(np.isfinite(logits)):
        raise DomainError("forward pass produced non-finite logits")
    return logits, activations, preactivations


def forward(params: ParameterSet, spec: NetworkSpec, batch: Batch) -> Tensor:
    check_params(params, spec)
    _check_inputs(batch.inputs, spec)
    logits, _, _ = _forward_cache(params, spec, batch.inputs)
    return logits


def hidden_activations(params: ParameterSet, spec: NetworkSpec, inputs: Tensor) -> List[Tensor]:
    """Post-ReLU activations of every hidden layer, in order."""
    check_params(params, spec)
    inputs = np.asarray(inputs, dtype=np.float64)
    _check_inputs(inputs, spec)
    _, activations, _ = _forward_cache(params, spec, inputs)
    return activations[1:]


def _masked(logits: Tensor, class_mask: ClassMask) -> Tensor:
    if class_mask is None:
        return logits
    return np.where(class_mask[None, :], logits, -np.inf)


def softmax(logits: Tensor, class_mask: ClassMask = None) -> Tensor:
    z = _masked(logits, class_mask)
    shifted = z - z.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def _check_labels(batch: Batch, spec: NetworkSpec, class_mask: ClassMask) -> None:
    if len(batch) == 0:
        raise DomainError("loss of an empty batch is undefined")
    if batch.labels.min() < 0 or batch.labels.max() >= spec.num_classes:
        raise DomainError(f"labels must lie in [0, {spec.num_classes})")
    if class_mask is not None and not np.all(class_mask[batch.labels]):
        raise DomainError("batch contains labels of masked classes")


def _backward(
    params: ParameterSet,
    spec: NetworkSpec,
    dz: Tensor,
    activations: List[Tensor],
    preactivations: List[Tensor],
    per_sample: bool,
) -> Tensor:
    rows = dz.shape[0]
    grads = np.empty((rows, len(params))) if per_sample else np.empty(len(params))
    names = layer_names(spec)
    for depth in range(len(names) - 1, -1, -1):
        name = names[depth]
        w_seg = params.segment(f"{name}.weight")
        b_seg = params.segment(f"{name}.bias")
        h_prev = activations[depth]
        if per_sample:
            grads[:, w_seg.slice] = np.einsum("bo,bi->boi", dz, h_prev).reshape(rows, -1)
            grads[:, b_seg.slice] = dz
        else:
            grads[w_seg.slice] = (dz.T @ h_prev).reshape(-1)
            grads[b_seg.slice] = dz.sum(axis=0)
        if depth > 0:
            dz = (dz @ params.view(f"{name}.weight")) * (preactivations[depth - 1] > 0)
    return grads


def loss_and_grad(params: ParameterSet, spec: NetworkSpec, batch: Batch, class_mask: ClassMask = None) -> Tuple[float, ParameterSet]:
    """Mean softmax cross-entropy over the batch and its exact gradient.

    Logits of classes outside `class_mask` are treated as -inf, which removes
    them from the normaliser and gives them zero gradient.
    """
    check_params(params, spec)
    _check_inputs(batch.inputs, spec)
    _check_labels(batch, spec, class_mask)
    logits, activations, preactivations = _forward_cache(params, spec, batch.inputs)
    z = _masked(logits, class_mask)
    shifted = z - z.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    total = exp.sum(axis=1, keepdims=True)
    rows = np.arange(len(batch))
    loss = float(np.mean(np.log(total[:, 0]) - shifted[rows, batch.labels]))
    probs = exp / total
    dz = probs
    dz[rows, batch.labels] -= 1.0
    dz /= len(batch)
    grads = _backward(params, spec, dz, activations, preactivations, per_sample=False)
    return loss, params.with_flat(grads)


def per_sample_grads(params: ParameterSet, spec: NetworkSpec, batch: Batch, class_mask: ClassMask = None) -> Tensor:
    """Row n holds the gradient of -log p(y_n | x_n), shape [B, |θ|]."""
    check_params(params, spec)
    _check_inputs(batch.inputs, spec)
    _check_labels(batch, spec, class_mask)
    logits, activations, preactivations = _forward_cache(params, spec, batch.inputs)
    dz = softmax(logits, class_mask)
    dz[np.arange(len(batch)), batch.labels] -= 1.0
    return _backward(params, spec, dz, activations, preactivations, per_sample=True)


def predict(params: ParameterSet, spec: NetworkSpec, inputs: Tensor, class_mask: ClassMask = None) -> npt.NDArray[np.int64]:
    """Arg-max class per row; ties resolve to the lowest class index."""
    check_params(params, spec)
    inputs = np.asarray(inputs, dtype=np.float64)
    _check_inputs(inputs, spec)
    logits, _, _ = _forward_cache(params, spec, inputs)
    return np.argmax(_masked(logits, class_mask), axis=1).astype(np.int64)


def class_mask_for(spec: NetworkSpec, classes) -> npt.NDArray[np.bool_]:
    mask = np.zeros(spec.num_classes, dtype=bool)
    mask[np.asarray(list(classes), dtype=np.int64)] = True
    return mask
