# -*- coding: utf-8 -*-
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from wsclab.datastructures import NetworkSpec, ResetConfig
from wsclab.enum import ResetStrategy
from wsclab.exceptions import ConfigurationError, DomainError, ShapeError
from wsclab.nn import ParameterSet, Tensor, coordinate_init_std, draw_segment, hidden_activations, init_bound, layer_names

from .dormant import IndexSet


def _check(theta: ParameterSet, theta_prev: Optional[ParameterSet], reset_idx: IndexSet) -> None:
    if theta_prev is not None:
        theta.check_layout(theta_prev, "current and previous-task parameters")
    if reset_idx.size and (reset_idx.min() < 0 or reset_idx.max() >= len(theta)):
        raise ShapeError("reset indices fall outside the parameter layout")


def soft_reset(theta: ParameterSet, theta_prev: ParameterSet, reset_idx: IndexSet, alpha_mix: float) -> ParameterSet:
    """θ[l] <- α·θ[l] + (1-α)·θ_prev[l] on the reset set; other coordinates are copied bit for bit."""
    reset_idx = np.asarray(reset_idx, dtype=np.int64)
    _check(theta, theta_prev, reset_idx)
    flat = theta.flat.copy()
    flat[reset_idx] = alpha_mix * theta.flat[reset_idx] + (1.0 - alpha_mix) * theta_prev.flat[reset_idx]
    return theta.with_flat(flat)


def revert(theta: ParameterSet, theta_prev: ParameterSet, reset_idx: IndexSet) -> ParameterSet:
    reset_idx = np.asarray(reset_idx, dtype=np.int64)
    _check(theta, theta_prev, reset_idx)
    flat = theta.flat.copy()
    flat[reset_idx] = theta_prev.flat[reset_idx]
    return theta.with_flat(flat)


def random_reinit(theta: ParameterSet, reset_idx: IndexSet, rng: np.random.Generator) -> ParameterSet:
    reset_idx = np.asarray(reset_idx, dtype=np.int64)
    _check(theta, None, reset_idx)
    flat = theta.flat.copy()
    if reset_idx.size == 0:
        return theta.with_flat(flat)
    fresh = np.concatenate([draw_segment(segment, rng) for segment in theta])
    flat[reset_idx] = fresh[reset_idx]
    return theta.with_flat(flat)


def shrink_perturb(theta: ParameterSet, shrink: float, noise_scale: Optional[float], rng: np.random.Generator) -> ParameterSet:
    """θ <- λ·θ + σ·ξ on every coordinate; σ defaults to 1% of the init-scheme std per layer."""
    sigma = 0.01 * coordinate_init_std(theta) if noise_scale is None else np.full(len(theta), noise_scale)
    return theta.with_flat(shrink * theta.flat + sigma * rng.standard_normal(len(theta)))


def unit_utilities(theta: ParameterSet, spec: NetworkSpec, probe_inputs: Tensor) -> list[Tensor]:
    """Per hidden unit: mean |activation| over the probe batch times the L1 norm of its outgoing weights."""
    names = layer_names(spec)
    utilities = []
    for depth, activation in enumerate(hidden_activations(theta, spec, probe_inputs)):
        outgoing = theta.view(f"{names[depth + 1]}.weight")
        utilities.append(np.mean(np.abs(activation), axis=0) * np.sum(np.abs(outgoing), axis=0))
    return utilities


def continual_backprop(
    theta: ParameterSet,
    spec: NetworkSpec,
    reset_fraction: float,
    probe_inputs: Tensor,
    rng: np.random.Generator,
) -> Tuple[ParameterSet, int]:
    """Simplified unit-utility reinitialisation: in each hidden layer the lowest-utility
    units get fresh incoming weights, a zero bias and zero outgoing weights."""
    names = layer_names(spec)
    flat = theta.flat.copy()
    touched = 0
    for depth, utility in enumerate(unit_utilities(theta, spec, probe_inputs)):
        k = int(np.floor(reset_fraction * utility.shape[0] + 1e-9))
        if k == 0:
            continue
        units = np.argsort(utility, kind="stable")[:k]
        w_in = theta.segment(f"{names[depth]}.weight")
        b_in = theta.segment(f"{names[depth]}.bias")
        w_out = theta.segment(f"{names[depth + 1]}.weight")
        fan_in = w_in.shape[1]
        bound = init_bound(fan_in)
        incoming = flat[w_in.slice].reshape(w_in.shape)
        incoming[units, :] = rng.uniform(-bound, bound, size=(k, fan_in))
        flat[b_in.slice][units] = 0.0
        outgoing = flat[w_out.slice].reshape(w_out.shape)
        outgoing[:, units] = 0.0
        touched += k * (fan_in + 1 + w_out.shape[0])
    return theta.with_flat(flat), touched


def alt_reset(
    theta: ParameterSet,
    theta_prev: Optional[ParameterSet],
    reset_idx: IndexSet,
    cfg: ResetConfig,
    rng: np.random.Generator,
    spec: Optional[NetworkSpec] = None,
    probe_inputs: Optional[Tensor] = None,
) -> ParameterSet:
    theta, _ = apply_reset(theta, theta_prev, reset_idx, cfg, rng, spec, probe_inputs)
    return theta


def apply_reset(
    theta: ParameterSet,
    theta_prev: Optional[ParameterSet],
    reset_idx: IndexSet,
    cfg: ResetConfig,
    rng: np.random.Generator,
    spec: Optional[NetworkSpec] = None,
    probe_inputs: Optional[Tensor] = None,
) -> Tuple[ParameterSet, int]:
    """Dispatch on `cfg.strategy`; returns the new parameters and the number of coordinates rewritten.

    Strategies other than shrink_perturb leave θ untouched when the reset set is empty.
    """
    reset_idx = np.asarray(reset_idx, dtype=np.int64)
    strategy = cfg.strategy
    if strategy is ResetStrategy.SOFT_BLEND:
        return soft_reset(theta, _need(theta_prev, strategy), reset_idx, cfg.alpha_mix), int(reset_idx.size)
    if strategy is ResetStrategy.REVERT:
        return revert(theta, _need(theta_prev, strategy), reset_idx), int(reset_idx.size)
    if strategy is ResetStrategy.RANDOM_REINIT:
        return random_reinit(theta, reset_idx, rng), int(reset_idx.size)
    if strategy is ResetStrategy.SHRINK_PERTURB:
        return shrink_perturb(theta, cfg.sp_shrink, cfg.sp_noise_scale, rng), len(theta)
    if strategy is ResetStrategy.CONTINUAL_BACKPROP:
        if reset_idx.size == 0:
            return theta.copy(), 0
        if spec is None or probe_inputs is None:
            raise DomainError("continual_backprop needs the network spec and a probe batch")
        return continual_backprop(theta, spec, cfg.cbp_reset_fraction, probe_inputs, rng)
    raise ConfigurationError(f"unknown reset strategy {strategy!r}", field="reset.strategy")


def _need(theta_prev: Optional[ParameterSet], strategy: ResetStrategy) -> ParameterSet:
    if theta_prev is None:
        raise DomainError(f"strategy '{strategy.value}' needs the previous-task parameters")
    return theta_prev
