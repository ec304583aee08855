# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from wsclab.exceptions import DomainError, ShapeError
from wsclab.nn import ParameterSet, Tensor

DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999


@dataclass(frozen=True)
class MomentState:
    """First/second exponential gradient moments over a ParameterSet layout.

    `beta1`/`beta2` are the decay rates the state has been advanced with; the
    bias correction needs them.
    """

    m: Tensor
    v: Tensor
    step_count: int = 0
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2

    @classmethod
    def fresh(cls, params: ParameterSet, beta1: float = DEFAULT_BETA1, beta2: float = DEFAULT_BETA2) -> "MomentState":
        return cls(m=np.zeros(len(params)), v=np.zeros(len(params)), step_count=0, beta1=beta1, beta2=beta2)

    def check_layout(self, params: ParameterSet) -> None:
        if self.m.shape != params.flat.shape or self.v.shape != params.flat.shape:
            raise ShapeError(f"moment state of {self.m.shape[0]} coordinates does not match {len(params)} parameters")


def update_shadow_moments(moments: MomentState, grads: ParameterSet, beta1: float, beta2: float) -> MomentState:
    moments.check_layout(grads)
    g = grads.flat
    m = beta1 * moments.m + (1.0 - beta1) * g
    v = beta2 * moments.v + (1.0 - beta2) * (g * g)
    return replace(moments, m=m, v=v, step_count=moments.step_count + 1, beta1=beta1, beta2=beta2)


def bias_corrected(moments: MomentState) -> Tuple[Tensor, Tensor]:
    if moments.step_count < 1:
        raise DomainError("bias correction needs at least one recorded gradient")
    m_hat = moments.m / (1.0 - moments.beta1**moments.step_count)
    v_hat = moments.v / (1.0 - moments.beta2**moments.step_count)
    return m_hat, v_hat


def raw_moments(moments: MomentState) -> Tuple[Tensor, Tensor]:
    if moments.step_count < 1:
        raise DomainError("moment state has not recorded any gradient")
    return moments.m.copy(), moments.v.copy()
