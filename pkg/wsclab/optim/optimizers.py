# -*- coding: utf-8 -*-
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from wsclab.datastructures import OptimizerConfig
from wsclab.enum import OptimizerKind
from wsclab.nn import ParameterSet, Tensor
from wsclab.nn.params import check_flat

from .moments import MomentState, bias_corrected, update_shadow_moments


def sgd_step(params: ParameterSet, grads: ParameterSet, cfg: OptimizerConfig, velocity: Optional[Tensor] = None) -> Tuple[ParameterSet, Tensor]:
    """Heavy-ball SGD: v <- mu*v + g, theta <- theta - lr*v."""
    params.check_layout(grads, "parameters and gradients")
    if velocity is None:
        velocity = np.zeros(len(params))
    check_flat(velocity, params, "velocity")
    velocity = cfg.sgd_momentum * velocity + grads.flat
    return params.with_flat(params.flat - cfg.learning_rate * velocity), velocity


def adam_step(params: ParameterSet, grads: ParameterSet, cfg: OptimizerConfig, moments: MomentState) -> Tuple[ParameterSet, MomentState]:
    params.check_layout(grads, "parameters and gradients")
    moments = update_shadow_moments(moments, grads, cfg.adam_beta1, cfg.adam_beta2)
    m_hat, v_hat = bias_corrected(moments)
    update = cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
    return params.with_flat(params.flat - update), moments


class Optimizer:
    """Stateful wrapper the training loops drive; owns velocity or Adam moments."""

    def __init__(self, cfg: OptimizerConfig, params: ParameterSet) -> None:
        self.cfg = cfg
        self.steps = 0
        self._velocity: Optional[Tensor] = None
        self._moments = MomentState.fresh(params, cfg.adam_beta1, cfg.adam_beta2)

    def step(self, params: ParameterSet, grads: ParameterSet) -> ParameterSet:
        self.steps += 1
        if self.cfg.kind is OptimizerKind.ADAM:
            params, self._moments = adam_step(params, grads, self.cfg, self._moments)
            return params
        params, self._velocity = sgd_step(params, grads, self.cfg, self._velocity)
        return params
