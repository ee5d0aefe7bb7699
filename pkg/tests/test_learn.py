from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rebalance.core import Dataset, ParameterError
from rebalance.learn import (PERFECT_ALPHA, BoostedModel, ConvergenceError, LinearModel,
                             Penalty, Stump, balanced_weights, best_stump, boosted_predict,
                             boosted_score, data_loss_grad, fit_adaboost, fit_logistic,
                             loss_and_grad, predict_logistic, weighted_log_loss)


def _blobs(n0, n1, seed=0, sep=1.0, d=2):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0, 1, (n0, d)), rng.normal(sep, 1, (n1, d))])
    return Dataset(X, [0] * n0 + [1] * n1)


def _zero_model(d, penalty=Penalty.L2, strength=1.0):
    return LinearModel(np.zeros(d + 1), penalty, strength)


def test_zero_theta_loss_is_n_ln2():
    ds = _blobs(30, 12)
    assert weighted_log_loss(_zero_model(2), ds, penalty=None) == pytest.approx(42 * math.log(2))
    # the L2 penalty is zero at theta = 0 as well
    assert weighted_log_loss(_zero_model(2), ds) == pytest.approx(42 * math.log(2))


def test_loss_linear_in_class_weights():
    ds = _blobs(20, 7, seed=1)
    m = LinearModel(np.array([0.3, -0.7, 0.2]), Penalty.L2, 1.0)
    a = weighted_log_loss(m, ds, {0: 1.0, 1: 0.0}, penalty=None)
    b = weighted_log_loss(m, ds, {0: 0.0, 1: 1.0}, penalty=None)
    mix = weighted_log_loss(m, ds, {0: 2.5, 1: 0.4}, penalty=None)
    assert mix == pytest.approx(2.5 * a + 0.4 * b, rel=1e-12)


def _rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(3, 40)), int(rng.integers(1, 5))
    Xb = np.hstack([rng.normal(size=(n, d)), np.ones((n, 1))])
    y = rng.integers(0, 2, n).astype(float)
    sw = rng.uniform(0.1, 5.0, n)
    theta = rng.normal(size=d + 1)
    for pen in (None, Penalty.L2):
        _, g = loss_and_grad(theta, Xb, y, sw, pen, 0.7)
        fd = oracles.finite_difference_grad(
            lambda t: loss_and_grad(np.array(t), Xb, y, sw, pen, 0.7)[0], theta.tolist())
        assert _rel_err(g, fd) <= 1e-5


def test_balanced_weights_examples():
    ds = Dataset(np.zeros((7000, 1)), [0] * 6320 + [1] * 680)
    w = balanced_weights(ds)
    assert w[0] == pytest.approx(7000 / 12640) and w[1] == pytest.approx(7000 / 1360)
    assert balanced_weights(_blobs(5, 5)) == {0: 1.0, 1: 1.0}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_loss_convex_along_segments(seed, lam):
    rng = np.random.default_rng(seed)
    Xb = np.hstack([rng.normal(size=(25, 2)), np.ones((25, 1))])
    y = rng.integers(0, 2, 25).astype(float)
    sw = rng.uniform(0.5, 2.0, 25)
    a, b = rng.normal(size=3) * 3, rng.normal(size=3) * 3
    f = lambda t: data_loss_grad(t, Xb, y, sw)[0]  # noqa: E731
    mid = f(lam * a + (1 - lam) * b)
    assert mid <= lam * f(a) + (1 - lam) * f(b) + 1e-9 * (1 + abs(mid))


@pytest.mark.parametrize("penalty", ["l2", "l1"])
def test_fit_objective_monotone(penalty):
    trace = []
    fit_logistic(_blobs(200, 40, seed=3), penalty, 1.0, trace=trace)
    assert len(trace) >= 2
    assert all(b <= a + 1e-12 * abs(a) for a, b in zip(trace, trace[1:]))


def _separable_1d():
    x = np.array([-3, -2, -1.5, -1, -0.5, 0.5, 1, 2, 2.5, 4.0])
    return Dataset(x.reshape(-1, 1), [0] * 5 + [1] * 5)


@pytest.mark.parametrize("strength", [1.0, 10.0, 100.0])
def test_separable_1d_perfect_accuracy(strength):
    ds = _separable_1d()
    model = fit_logistic(ds, Penalty.L2, strength)
    labels, _ = predict_logistic(model, ds.features)
    assert np.array_equal(labels, ds.labels)


def test_separable_1d_grid_oracle_agrees():
    # oracle: scan (w, b) on a grid and take the best penalized objective
    ds = _separable_1d()
    model = fit_logistic(ds, Penalty.L2, 1.0, tol=1e-12)
    fitted = weighted_log_loss(model, ds)
    best = math.inf
    for w in np.linspace(0, 6, 121):
        for b in np.linspace(-2, 2, 81):
            m = LinearModel(np.array([w, b]), Penalty.L2, 1.0, mean=model.mean, scale=model.scale)
            best = min(best, weighted_log_loss(m, ds))
    assert fitted <= best + 1e-6


def test_l1_tiny_strength_zeroes_weights():
    model = fit_logistic(_blobs(100, 30, seed=4, sep=2.0), Penalty.L1, 1e-4)
    assert np.all(model.theta[:-1] == 0.0)


def test_l1_produces_exact_zeros_for_noise_feature():
    rng = np.random.default_rng(6)
    x = rng.normal(size=300)
    noise = rng.normal(size=300)
    y = (x + 0.3 * rng.normal(size=300) > 0).astype(int)
    model = fit_logistic(Dataset(np.column_stack([x, noise]), y), Penalty.L1, 0.02)
    assert model.theta[0] != 0.0 and model.theta[1] == 0.0


def test_nonconvergence_is_reported():
    with pytest.raises(ConvergenceError, match="last objective"):
        fit_logistic(_blobs(200, 40, seed=3), "l2", 100.0, tol=1e-300, max_iters=2)


def test_bad_strength():
    with pytest.raises(ParameterError):
        fit_logistic(_blobs(10, 4), "l2", 0.0)


def test_zero_model_predicts_minority_everywhere():
    labels, scores = predict_logistic(_zero_model(2), np.random.default_rng(0).normal(size=(20, 2)))
    assert np.all(scores == 0.5) and np.all(labels == 1)


# --- boosting -----------------------------------------------------------------

def test_adaboost_threshold_data_one_round():
    ds = _separable_1d()
    model = fit_adaboost(ds, rounds=10)
    assert len(model.stumps) == 1 and model.alphas[0] == PERFECT_ALPHA
    assert np.array_equal(boosted_predict(model, ds.features), ds.labels)


def test_single_stump_model_reproduces_stump_labels():
    stump = Stump(0, 0.0, 1)
    model = BoostedModel([stump], [PERFECT_ALPHA])
    X = np.linspace(-2, 2, 9).reshape(-1, 1)
    assert np.array_equal(boosted_predict(model, X), (stump.predict(X) > 0).astype(int))


def test_exact_xor_has_no_useful_stump():
    X = np.array([[0, 0], [1, 1], [0, 1], [1, 0]], dtype=float)
    ds = Dataset(X, [1, 1, 0, 0])
    errs = oracles.stump_errors(X.tolist(), [1, 1, -1, -1], [0.25] * 4)
    assert all(e == 0.5 for e, *_ in errs)
    model = fit_adaboost(ds, rounds=5)
    assert model.stumps == ()
    # the empty model scores 0 and predicts minority, so the error stays at 0.5
    assert np.mean(boosted_predict(model, X) != ds.labels) == 0.5


def _reference_adaboost(X, ypm, rounds):
    n = len(X)
    w = [1.0 / n] * n
    chosen = []
    for _ in range(rounds):
        cands = oracles.stump_errors(X, ypm, w)
        lo = min(c[0] for c in cands)
        f, t, pol, err = min((f, t, pol, e) for e, f, t, pol in cands if e <= lo + 1e-12)
        if err >= 0.5 - 1e-12:
            break
        chosen.append((f, t, pol))
        if err <= 1e-12:
            break
        alpha = 0.5 * math.log((1 - err) / err)
        pred = [1 if pol * (row[f] - t) > 0 else -1 for row in X]
        w = [wi * math.exp(-alpha * yi * pi) for wi, yi, pi in zip(w, ypm, pred)]
        s = sum(w)
        w = [wi / s for wi in w]
    return chosen


def test_rank_general_xor_matches_brute_force():
    X = [[0.0, 0.0], [3.0, 3.0], [1.0, 2.0], [2.0, 1.0]]
    ds = Dataset(np.array(X), [1, 1, 0, 0])
    model = fit_adaboost(ds, rounds=6)
    got = [(s.feature_index, s.threshold, s.polarity) for s in model.stumps]
    assert got == _reference_adaboost(X, [1, 1, -1, -1], 6)
    assert len(got) >= 3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_adaboost_matches_brute_force_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 25))
    X = rng.integers(-3, 4, size=(n, 2)).astype(float)
    y = rng.integers(0, 2, n)
    y[0], y[1] = 0, 1
    model = fit_adaboost(Dataset(X, y), rounds=5)
    got = [(s.feature_index, s.threshold, s.polarity) for s in model.stumps]
    assert got == _reference_adaboost(X.tolist(), [1 if v else -1 for v in y], 5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_training_error_within_exponential_bound(seed):
    ds = _blobs(40, 20, seed=seed % 1000, sep=1.0)
    model = fit_adaboost(ds, rounds=8)
    err = float(np.mean(boosted_predict(model, ds.features) != ds.labels))
    bound = 1.0
    for e in model.errors:
        bound *= 2 * math.sqrt(e * (1 - e))
    assert err <= bound + 1e-12


def test_best_stump_tie_rule():
    # two features that separate equally well: the first feature wins
    X = np.array([[0, 0], [1, 1]], dtype=float)
    stump, err = best_stump(X, np.array([-1, 1]), np.array([0.5, 0.5]))
    assert (stump.feature_index, stump.threshold, stump.polarity, err) == (0, 0.5, 1, 0.0)
    # all-error split: polarity -1 comes first
    stump, err = best_stump(X, np.array([1, -1]), np.array([0.5, 0.5]))
    assert (stump.polarity, err) == (-1, 0.0)


def test_threshold_shifts_predictions_monotonically():
    ds = _blobs(60, 30, seed=2)
    model = fit_adaboost(ds, rounds=6)
    prev = None
    for b in np.linspace(-3, 3, 13):
        n_min = int(boosted_predict(model.with_threshold(b), ds.features).sum())
        if prev is not None:
            assert n_min <= prev
        prev = n_min


def test_scores_add_across_models():
    ds = _blobs(50, 20, seed=7)
    a = fit_adaboost(ds, rounds=3)
    b = fit_adaboost(_blobs(50, 20, seed=8), rounds=4)
    X = ds.features
    assert np.allclose(boosted_score(a + b, X), boosted_score(a, X) + boosted_score(b, X))
