import numpy as np
import pytest

from tests.utils import dense_hessian_diagonal, random_batch, random_params
from wsclab.consolidation import (
    ScoringContext,
    compute_importance,
    hutchinson_diagonal,
    score_fisher,
    score_first_moment,
    score_hessian_hutchinson,
    score_inter_task_drift,
    score_intra_task_drift,
    score_moment,
    score_param_drift,
    score_second_moment,
)
from wsclab.datastructures import NetworkSpec, ResetConfig
from wsclab.enum import ImportanceMetric
from wsclab.exceptions import DomainError, ShapeError
from wsclab.nn import Batch, ParameterSet, build_segments, init_params, per_sample_grads
from wsclab.optim import MomentState, bias_corrected, update_shadow_moments


def vector(values) -> ParameterSet:
    values = np.asarray(values, dtype=np.float64)
    return ParameterSet(build_segments([("w", (values.shape[0],))]), values)


def moments_after(gradients) -> MomentState:
    state = MomentState.fresh(vector(np.zeros(len(gradients[0]))))
    for g in gradients:
        state = update_shadow_moments(state, vector(g), 0.9, 0.999)
    return state


def test_moment_score_is_abs_m_hat_times_v_hat():
    state = moments_after([[0.5, -1.0], [0.2, 3.0], [-0.4, 2.0]])
    m_hat, v_hat = bias_corrected(state)
    scores = score_moment(state)
    assert np.allclose(scores.scores, np.abs(m_hat) * v_hat, rtol=0, atol=0)
    assert scores.metric_used is ImportanceMetric.MOMENT


def test_moment_score_direct_value():
    state = MomentState(m=np.array([0.05]), v=np.array([0.0002]), step_count=1, beta1=0.9, beta2=0.999)
    # m̂ = 0.05 / 0.1 = 0.5, v̂ = 0.0002 / 0.001 = 0.2
    assert score_moment(state).scores[0] == pytest.approx(0.1)


def test_consistent_gradient_outranks_alternating():
    gradients = [[1.0, (-1.0) ** i] for i in range(50)]
    scores = score_moment(moments_after(gradients)).scores
    assert scores[0] > scores[1]


def test_single_moment_scores():
    state = MomentState(m=np.array([-0.03]), v=np.array([4e-5]), step_count=1)
    assert score_first_moment(state).scores[0] == pytest.approx(0.3)
    assert score_second_moment(state).scores[0] == pytest.approx(0.04)


def test_constant_gradient_rankings_agree():
    gradients = [[0.1, 2.0, -0.7, 0.0]] * 30
    state = moments_after(gradients)
    reference = np.argsort(score_moment(state).scores, kind="stable")
    assert np.array_equal(np.argsort(score_first_moment(state).scores, kind="stable"), reference)
    assert np.array_equal(np.argsort(score_second_moment(state).scores, kind="stable"), reference)


def test_fresh_moments_cannot_be_scored():
    with pytest.raises(DomainError):
        score_moment(MomentState.fresh(vector([0.0])))


def test_raw_moment_score():
    state = moments_after([[2.0]])
    assert score_moment(state, bias_corrected=False).scores[0] == pytest.approx(0.2 * 0.004)


def test_param_drift():
    assert np.array_equal(score_param_drift(vector([1.0, 2.0]), vector([1.0, 2.0])).scores, [0.0, 0.0])
    assert score_param_drift(vector([2.0]), vector([4.0])).scores[0] == 2.0
    with pytest.raises(ShapeError):
        score_param_drift(vector([2.0]), vector([4.0, 1.0]))


def test_drift_scores_match_checkpoint_difference():
    before, after = vector([0.1, -0.2, 0.3]), vector([0.4, -0.2, -0.3])
    assert np.allclose(score_inter_task_drift(after, before).scores, np.abs(after.flat - before.flat))
    accumulated = np.array([0.5, 0.0, 0.25])
    assert np.array_equal(score_intra_task_drift(accumulated, after).scores, accumulated)
    with pytest.raises(ShapeError):
        score_intra_task_drift(np.zeros(2), after)


def test_fisher_matches_closed_form_logistic():
    spec = NetworkSpec(input_dim=1, num_classes=2)
    params = init_params(spec).with_flat(np.array([0.7, -0.4, 0.1, 0.2]))
    xs = np.array([[-1.0], [0.5], [2.0], [0.0]])
    ys = np.array([0, 1, 1, 0])
    fisher = score_fisher(params, spec, Batch.of(xs, ys)).scores

    w, b = np.array([0.7, -0.4]), np.array([0.1, 0.2])
    expected = np.zeros(4)
    for x, y in zip(xs[:, 0], ys):
        logits = w * x + b
        p = np.exp(logits - logits.max())
        p /= p.sum()
        d = p - np.eye(2)[y]
        expected += np.concatenate([d * x, d]) ** 2
    assert np.allclose(fisher, expected / 4, rtol=0, atol=1e-10)


def test_fisher_edge_cases(tiny_spec: NetworkSpec):
    params = random_params(tiny_spec, 2)
    batch = random_batch(tiny_spec, 1, 3)
    one = score_fisher(params, tiny_spec, batch)
    assert np.allclose(one.scores, per_sample_grads(params, tiny_spec, batch)[0] ** 2)
    with pytest.raises(DomainError):
        score_fisher(params, tiny_spec, [])


def test_hutchinson_is_exact_on_diagonal_quadratics():
    a = np.array([3.0, 0.5, -2.0, 7.0])

    def grad(theta):
        return a * theta

    for probes in (1, 3, 10):
        estimate = hutchinson_diagonal(grad, np.array([0.2, -1.0, 0.0, 4.0]), probes, probe_seed=9)
        assert np.allclose(estimate, a, atol=1e-8)


def test_hutchinson_is_deterministic_under_probe_seed(tiny_spec: NetworkSpec):
    params = random_params(tiny_spec, 4)
    batch = random_batch(tiny_spec, 8, 5)
    first = score_hessian_hutchinson(params, tiny_spec, batch, Kp=4, probe_seed=1)
    again = score_hessian_hutchinson(params, tiny_spec, batch, Kp=4, probe_seed=1)
    assert np.array_equal(first.scores, again.scores)
    assert first.extra_passes == 8
    with pytest.raises(DomainError):
        hutchinson_diagonal(lambda theta: theta, np.zeros(2), 0, 0)


def test_hutchinson_tracks_dense_hessian_on_top_coordinates():
    spec = NetworkSpec(input_dim=3, hidden_dims=(4,), num_classes=3)
    params = random_params(spec, 11, scale=0.8)
    batch = random_batch(spec, 16, 12)
    dense = np.abs(dense_hessian_diagonal(params, spec, batch))
    estimate = score_hessian_hutchinson(params, spec, batch, Kp=64, probe_seed=3).scores
    top = np.argsort(-dense, kind="stable")[: max(1, len(dense) // 10)]
    assert np.linalg.norm(estimate[top] - dense[top]) <= 0.25 * np.linalg.norm(dense[top])


def test_compute_importance_dispatch_and_requirements(tiny_spec: NetworkSpec):
    params = random_params(tiny_spec, 0)
    ctx = ScoringContext(spec=tiny_spec, theta=params)
    with pytest.raises(DomainError):
        compute_importance(ResetConfig(metric="moment"), ctx)
    with pytest.raises(DomainError):
        compute_importance(ResetConfig(metric="fisher"), ctx)
    ctx.theta_prev = params.copy()
    drift = compute_importance(ResetConfig(metric="param_drift"), ctx)
    assert drift.metric_used is ImportanceMetric.PARAM_DRIFT
    assert np.all(drift.scores == 0.0)
