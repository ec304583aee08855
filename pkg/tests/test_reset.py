import numpy as np
import pytest

from tests.utils import brute_force_dormant, random_params
from wsclab.consolidation import (
    ImportanceVector,
    apply_reset,
    alt_reset,
    continual_backprop,
    eligible_mask,
    find_dormant_params,
    random_reinit,
    reset_quota,
    revert,
    shrink_perturb,
    soft_reset,
    unit_utilities,
)
from wsclab.datastructures import NetworkSpec, ResetConfig
from wsclab.enum import ImportanceMetric, ResetStrategy
from wsclab.exceptions import ShapeError
from wsclab.nn import ParameterSet, build_segments, init_params


def scored(values) -> ImportanceVector:
    return ImportanceVector(np.asarray(values, dtype=np.float64), ImportanceMetric.MOMENT)


def flat_layout(*sizes: int) -> ParameterSet:
    segments = build_segments([(f"layer{i}", (size,)) for i, size in enumerate(sizes)])
    return ParameterSet.zeros(segments)


def test_bottom_half_global():
    layout = flat_layout(4)
    chosen = find_dormant_params(scored([5, 1, 3, 2]), ResetConfig(retain=0.5), layout)
    assert chosen.tolist() == [1, 3]


def test_full_retention_selects_nothing():
    layout = flat_layout(3, 5)
    for scope in ("global", "per_layer"):
        chosen = find_dormant_params(scored(np.arange(8.0)), ResetConfig(retain=1.0, scope=scope), layout)
        assert chosen.size == 0


def test_ties_prefer_lower_index():
    layout = flat_layout(6)
    chosen = find_dormant_params(scored([1, 0, 1, 0, 1, 0]), ResetConfig(retain=0.5), layout)
    assert chosen.tolist() == [1, 3, 5]
    chosen = find_dormant_params(scored([2.0] * 6), ResetConfig(retain=0.5), layout)
    assert chosen.tolist() == [0, 1, 2]


@pytest.mark.parametrize("retain", [0.0, 0.1, 0.2, 0.35, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("scope", ["global", "per_layer"])
def test_dormant_set_size_is_exact(retain: float, scope: str):
    layout = flat_layout(7, 3, 11, 1)
    scores = scored(np.random.default_rng(5).random(len(layout)))
    chosen = find_dormant_params(scores, ResetConfig(retain=retain, scope=scope), layout)
    assert chosen.size == reset_quota(len(layout), retain)
    assert np.unique(chosen).size == chosen.size


def test_quota_handles_representation_error():
    assert reset_quota(10, 0.7) == 3
    assert reset_quota(100, 0.2) == 80
    assert reset_quota(5, 0.0) == 5


@pytest.mark.parametrize("seed", range(10))
def test_global_ranking_matches_full_sort(seed: int):
    rng = np.random.default_rng(seed)
    layout = flat_layout(13, 6, 9)
    # coarse scores force ties
    values = rng.integers(0, 5, size=len(layout)).astype(np.float64)
    retain = float(rng.choice([0.1, 0.2, 0.5, 0.8]))
    chosen = find_dormant_params(scored(values), ResetConfig(retain=retain), layout)
    expected = brute_force_dormant(values, np.ones(len(layout), dtype=bool), retain)
    assert np.array_equal(chosen, expected)


@pytest.mark.parametrize("seed", range(10))
def test_per_layer_ranking_matches_full_sort_per_segment(seed: int):
    rng = np.random.default_rng(100 + seed)
    layout = flat_layout(10, 10, 10)
    values = rng.random(len(layout))
    chosen = find_dormant_params(scored(values), ResetConfig(retain=0.3, scope="per_layer"), layout)
    expected = np.concatenate(
        [brute_force_dormant(values[s.slice], np.ones(s.size, dtype=bool), 0.3) + s.offset for s in layout]
    )
    assert np.array_equal(chosen, expected)


def test_unseen_head_rows_are_not_eligible(tiny_spec: NetworkSpec, tiny_params: ParameterSet):
    mask = eligible_mask(tiny_params, seen_classes=[0, 1])
    head_w = tiny_params.segment("head.weight")
    head_b = tiny_params.segment("head.bias")
    assert mask[head_w.slice].reshape(head_w.shape)[:2].all()
    assert not mask[head_w.slice].reshape(head_w.shape)[2:].any()
    assert mask[head_b.slice].tolist() == [True, True, False, False, False, False]
    assert mask[: head_w.offset].all()

    chosen = find_dormant_params(scored(np.zeros(len(tiny_params))), ResetConfig(retain=0.0), tiny_params, seen_classes=[0, 1])
    assert chosen.size == int(mask.sum())
    assert mask[chosen].all()
    everything = find_dormant_params(
        scored(np.zeros(len(tiny_params))), ResetConfig(retain=0.0, exclude_unseen_head=False), tiny_params, seen_classes=[0, 1]
    )
    assert everything.size == len(tiny_params)


def test_score_length_must_match_layout():
    with pytest.raises(ShapeError):
        find_dormant_params(scored([1.0, 2.0]), ResetConfig(), flat_layout(3))


def test_soft_reset_blends_reset_coordinates_only():
    layout = flat_layout(3)
    theta = layout.with_flat(np.array([2.0, 7.0, -1.0]))
    theta_prev = layout.with_flat(np.array([4.0, 0.0, 5.0]))
    out = soft_reset(theta, theta_prev, np.array([0, 2]), 0.5)
    assert out.flat.tolist() == [3.0, 7.0, 2.0]
    assert theta.flat.tolist() == [2.0, 7.0, -1.0]


def test_soft_reset_endpoints(tiny_spec: NetworkSpec):
    theta = random_params(tiny_spec, 1)
    theta_prev = random_params(tiny_spec, 2)
    idx = np.arange(0, len(theta), 3)
    assert np.array_equal(soft_reset(theta, theta_prev, idx, 1.0).flat, theta.flat)
    assert np.array_equal(soft_reset(theta, theta_prev, idx, 0.0).flat, revert(theta, theta_prev, idx).flat)


def test_layout_mismatch_is_a_shape_error(tiny_params: ParameterSet):
    with pytest.raises(ShapeError):
        soft_reset(tiny_params, flat_layout(3), np.array([0]), 0.5)
    with pytest.raises(ShapeError):
        revert(tiny_params, tiny_params, np.array([len(tiny_params)]))


def test_revert_everything_restores_previous(tiny_spec: NetworkSpec):
    theta, theta_prev = random_params(tiny_spec, 3), random_params(tiny_spec, 4)
    out = revert(theta, theta_prev, np.arange(len(theta)))
    assert np.array_equal(out.flat, theta_prev.flat)


@pytest.mark.parametrize(
    "strategy",
    [ResetStrategy.SOFT_BLEND, ResetStrategy.REVERT, ResetStrategy.RANDOM_REINIT, ResetStrategy.CONTINUAL_BACKPROP],
)
def test_full_retention_leaves_theta_bit_identical(strategy: ResetStrategy, tiny_spec: NetworkSpec):
    theta, theta_prev = random_params(tiny_spec, 5), random_params(tiny_spec, 6)
    cfg = ResetConfig(retain=1.0, strategy=strategy)
    scores = scored(np.random.default_rng(0).random(len(theta)))
    idx = find_dormant_params(scores, cfg, theta)
    probe = np.random.default_rng(1).normal(size=(8, tiny_spec.input_dim))
    out, touched = apply_reset(theta, theta_prev, idx, cfg, np.random.default_rng(2), tiny_spec, probe)
    assert touched == 0
    assert np.array_equal(out.flat, theta.flat)


@pytest.mark.parametrize("strategy", [ResetStrategy.SOFT_BLEND, ResetStrategy.REVERT, ResetStrategy.RANDOM_REINIT])
def test_coordinates_outside_reset_set_are_untouched(strategy: ResetStrategy, tiny_spec: NetworkSpec):
    theta, theta_prev = random_params(tiny_spec, 7), random_params(tiny_spec, 8)
    idx = np.sort(np.random.default_rng(3).choice(len(theta), size=len(theta) // 4, replace=False))
    out = alt_reset(theta, theta_prev, idx, ResetConfig(strategy=strategy), np.random.default_rng(4))
    outside = np.setdiff1d(np.arange(len(theta)), idx)
    assert np.array_equal(out.flat[outside], theta.flat[outside])


def test_random_reinit_draws_from_init_scheme(tiny_spec: NetworkSpec):
    theta = random_params(tiny_spec, 9, scale=100.0)
    weight = theta.segment("fc0.weight")
    bias = theta.segment("fc0.bias")
    idx = np.concatenate([np.arange(weight.offset, weight.stop), np.arange(bias.offset, bias.stop)])
    out = random_reinit(theta, idx, np.random.default_rng(0))
    assert np.all(np.abs(out.view("fc0.weight")) <= np.sqrt(6.0 / tiny_spec.input_dim))
    assert np.all(out.view("fc0.bias") == 0.0)
    assert np.array_equal(out.view("head.weight"), theta.view("head.weight"))


def test_shrink_perturb_identity_and_shrink(tiny_spec: NetworkSpec):
    theta = random_params(tiny_spec, 10)
    rng = np.random.default_rng(0)
    assert np.array_equal(shrink_perturb(theta, 1.0, 0.0, rng).flat, theta.flat)
    assert np.array_equal(shrink_perturb(theta, 0.5, 0.0, rng).flat, 0.5 * theta.flat)
    noisy = shrink_perturb(theta, 1.0, None, np.random.default_rng(1))
    assert not np.array_equal(noisy.flat, theta.flat)
    assert np.max(np.abs(noisy.flat - theta.flat)) < 0.1


def test_shrink_perturb_ignores_reset_set(tiny_spec: NetworkSpec):
    theta = random_params(tiny_spec, 11)
    cfg = ResetConfig(strategy="shrink_perturb", sp_shrink=0.5, sp_noise=0.0, retain=1.0)
    out, touched = apply_reset(theta, None, np.zeros(0, dtype=np.int64), cfg, np.random.default_rng(0))
    assert touched == len(theta)
    assert np.array_equal(out.flat, 0.5 * theta.flat)


def test_continual_backprop_replaces_the_dead_unit(tiny_spec: NetworkSpec):
    theta = random_params(tiny_spec, 12)
    flat = theta.flat.copy()
    weight = theta.segment("fc0.weight")
    bias = theta.segment("fc0.bias")
    flat[weight.slice].reshape(weight.shape)[0, :] = 0.0
    flat[bias.slice][0] = 0.0
    theta = theta.with_flat(flat)
    probe = np.random.default_rng(13).normal(size=(32, tiny_spec.input_dim))

    utilities = unit_utilities(theta, tiny_spec, probe)
    assert utilities[0][0] == 0.0
    assert np.all(utilities[0][1:] > 0.0)

    out, touched = continual_backprop(theta, tiny_spec, 0.2, probe, np.random.default_rng(14))
    assert touched == tiny_spec.input_dim + 1 + tiny_spec.num_classes
    assert np.any(out.view("fc0.weight")[0] != 0.0)
    assert out.view("fc0.bias")[0] == 0.0
    assert np.all(out.view("head.weight")[:, 0] == 0.0)
    assert np.array_equal(out.view("fc0.weight")[1:], theta.view("fc0.weight")[1:])
    assert np.array_equal(out.view("head.weight")[:, 1:], theta.view("head.weight")[:, 1:])


def test_continual_backprop_on_linear_model_is_a_no_op():
    spec = NetworkSpec(input_dim=3, num_classes=2)
    theta = init_params(spec)
    out, touched = continual_backprop(theta, spec, 0.5, np.ones((4, 3)), np.random.default_rng(0))
    assert touched == 0
    assert np.array_equal(out.flat, theta.flat)
