from .batch import Batch
from .network import (
    HEAD,
    check_params,
    class_mask_for,
    coordinate_init_std,
    draw_segment,
    forward,
    hidden_activations,
    init_bound,
    init_params,
    layer_names,
    loss_and_grad,
    param_segments,
    per_sample_grads,
    predict,
    softmax,
)
from .params import ParameterSet, Segment, Tensor, build_segments

__all__ = [
    "HEAD",
    "Batch",
    "ParameterSet",
    "Segment",
    "Tensor",
    "build_segments",
    "check_params",
    "class_mask_for",
    "coordinate_init_std",
    "draw_segment",
    "forward",
    "hidden_activations",
    "init_bound",
    "init_params",
    "layer_names",
    "loss_and_grad",
    "param_segments",
    "per_sample_grads",
    "predict",
    "softmax",
]
