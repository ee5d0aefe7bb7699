"""Weighted logistic regression and discrete AdaBoost over decision stumps.

Label 1 (minority) is the positive class throughout.  For boosting, labels
are mapped to +1 (minority) / -1 (majority).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .core import ClassLabel, Dataset, ParameterError


class Penalty(str, Enum):
    L1 = "l1"
    L2 = "l2"


class ConvergenceError(RuntimeError):
    pass


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Logistic model on standardized features.

    ``theta`` holds the weights followed by the bias.  ``mean``/``scale``
    are the training-set standardization replayed at prediction time.
    """

    theta: np.ndarray
    penalty: Penalty
    strength: float
    class_weights: dict = field(default_factory=lambda: {0: 1.0, 1: 1.0})
    mean: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None
    iterations: int = 0

    def __post_init__(self):
        theta = np.array(self.theta, dtype=np.float64)
        if theta.ndim != 1 or theta.size < 2:
            raise ParameterError("theta must be a vector of d weights plus a bias")
        if not np.all(np.isfinite(theta)):
            raise ParameterError("theta must be finite")
        if not self.strength > 0:
            raise ParameterError("strength must be positive")
        d = theta.size - 1
        mean = np.zeros(d) if self.mean is None else np.array(self.mean, dtype=np.float64)
        scale = np.ones(d) if self.scale is None else np.array(self.scale, dtype=np.float64)
        if mean.shape != (d,) or scale.shape != (d,):
            raise ParameterError("standardization vectors do not match theta")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "penalty", Penalty(self.penalty))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "class_weights",
                           {int(k): float(v) for k, v in self.class_weights.items()})

    @property
    def n_features(self) -> int:
        return self.theta.size - 1

    def standardize(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ParameterError(
                f"model expects {self.n_features} features, got {X.shape[1]}")
        return (X - self.mean) / self.scale


def _with_bias(Z: np.ndarray) -> np.ndarray:
    return np.hstack([Z, np.ones((Z.shape[0], 1))])


def _sample_weights(y: np.ndarray, class_weights: dict) -> np.ndarray:
    return np.where(y == 1, class_weights.get(1, 1.0), class_weights.get(0, 1.0))


def _penalty_value(theta: np.ndarray, penalty: Optional[Penalty], strength: float) -> float:
    w = theta[:-1]
    if penalty is None:
        return 0.0
    if penalty is Penalty.L2:
        return float(w @ w) / (2.0 * strength)
    return float(np.abs(w).sum()) / strength


def data_loss_grad(theta, Xb, y, sw) -> tuple[float, np.ndarray]:
    """Weighted negative log-likelihood and its gradient."""
    z = Xb @ theta
    # -ln P(y|x) = softplus(z) - y*z
    loss = float(sw @ (np.logaddexp(0.0, z) - y * z))
    grad = Xb.T @ (sw * (sigmoid(z) - y))
    return loss, grad


def loss_and_grad(theta, Xb, y, sw, penalty: Optional[Penalty], strength: float):
    """Full objective and the gradient of its smooth part.

    For L1 the returned gradient excludes the (non-smooth) penalty.
    """
    loss, grad = data_loss_grad(theta, Xb, y, sw)
    pen = _penalty_value(theta, penalty, strength)
    if penalty is Penalty.L2:
        grad = grad.copy()
        grad[:-1] += theta[:-1] / strength
    return loss + pen, grad


def weighted_log_loss(model: LinearModel, dataset: Dataset, class_weights: Optional[dict] = None,
                      penalty: Optional[Penalty] | str = "model") -> float:
    """Weighted negative log-likelihood plus the model's penalty.

    Pass ``penalty=None`` for the bare data term.
    """
    if dataset.n_features != model.n_features:
        raise ParameterError("model dimension does not match dataset")
    cw = model.class_weights if class_weights is None else class_weights
    pen = model.penalty if isinstance(penalty, str) and penalty == "model" else \
        (None if penalty is None else Penalty(penalty))
    Xb = _with_bias(model.standardize(dataset.features))
    y = dataset.labels.astype(np.float64)
    loss, _ = loss_and_grad(model.theta, Xb, y, _sample_weights(dataset.labels, cw),
                            pen, model.strength)
    return loss


def balanced_weights(dataset: Dataset) -> dict:
    """w_j = n / (2 n_j), so that sum_j n_j w_j = n."""
    n0, n1 = dataset.counts()
    if n0 == 0 or n1 == 0:
        raise ParameterError("balanced weights need both classes present")
    n = n0 + n1
    return {0: n / (2.0 * n0), 1: n / (2.0 * n1)}


def _soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def fit_logistic(dataset: Dataset, penalty: Penalty | str = Penalty.L2, strength: float = 1.0,
                 class_weights: Optional[dict] = None, tol: float = 1e-8,
                 max_iters: int = 1000, seed: int = 0, standardize: bool = True,
                 trace: Optional[list] = None) -> LinearModel:
    """Minimise the weighted log-loss from theta = 0.

    L2 uses gradient descent, L1 proximal gradient (soft-thresholding of the
    non-bias weights); both pick a Barzilai-Borwein trial step and backtrack
    until the objective decreases sufficiently, so the loss sequence is
    monotone.  ``seed`` is accepted for interface uniformity; the fit is
    deterministic.
    """
    del seed
    penalty = Penalty(penalty)
    if not strength > 0:
        raise ParameterError("strength must be positive")
    if not tol > 0:
        raise ParameterError("tol must be positive")
    cw = {0: 1.0, 1: 1.0} if class_weights is None else dict(class_weights)
    X = dataset.features
    if standardize:
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
    else:
        mean = np.zeros(X.shape[1])
        scale = np.ones(X.shape[1])
    Xb = _with_bias((X - mean) / scale)
    y = dataset.labels.astype(np.float64)
    sw = _sample_weights(dataset.labels, cw)

    # Lipschitz bound of the smooth part; 1/L always passes the line search
    H = Xb.T @ (Xb * sw[:, None])
    L = 0.25 * float(np.linalg.eigvalsh(H)[-1]) + (1.0 / strength if penalty is Penalty.L2 else 0.0)
    L = max(L, 1e-12)

    smooth_pen = penalty if penalty is Penalty.L2 else None
    l1 = penalty is Penalty.L1

    def smooth(theta):
        return loss_and_grad(theta, Xb, y, sw, smooth_pen, strength)

    def h(theta):
        return _penalty_value(theta, Penalty.L1, strength) if l1 else 0.0

    theta = np.zeros(Xb.shape[1])
    f, g = smooth(theta)
    F = f + h(theta)
    history = [F]
    step = 1.0 / L
    for it in range(1, max_iters + 1):
        t = step
        while True:
            if l1:
                cand = theta - t * g
                cand[:-1] = _soft_threshold(cand[:-1], t / strength)
                diff = cand - theta
                f_new, g_new = smooth(cand)
                ok = f_new <= f + g @ diff + (diff @ diff) / (2 * t) + 1e-12 * abs(f)
                gmap = np.linalg.norm(diff) / t
            else:
                cand = theta - t * g
                diff = cand - theta
                f_new, g_new = smooth(cand)
                ok = f_new <= f - 0.5 * t * (g @ g) + 1e-12 * abs(f)
                gmap = np.linalg.norm(g)
            if ok or t <= 1.0 / L:
                break
            t = max(0.5 * t, 1.0 / L)
        F_new = f_new + h(cand)
        if F_new > F:
            # only possible through round-off at the 1/L floor
            F_new, cand, g_new, f_new = F, theta, g, f
        decrease = F - F_new
        s = cand - theta
        yv = g_new - g
        theta, f, g, F = cand, f_new, g_new, F_new
        history.append(F)
        if gmap < 1e-6 or decrease <= tol * max(abs(F), 1e-300):
            if trace is not None:
                trace.extend(history)
            return LinearModel(theta, penalty, strength, cw, mean, scale, iterations=it)
        sy = float(s @ yv)
        step = float(s @ s) / sy if sy > 0 else 1.0 / L
        step = max(step, 1.0 / L)
    if trace is not None:
        trace.extend(history)
    tail = ", ".join(f"{v:.6g}" for v in history[-3:])
    raise ConvergenceError(
        f"logistic fit ({penalty.value}, C={strength}) did not converge in {max_iters} "
        f"iterations; last objective values: {tail}")


def predict_scores(model: LinearModel, points) -> np.ndarray:
    Z = model.standardize(points)
    return sigmoid(_with_bias(Z) @ model.theta)


def predict_logistic(model: LinearModel, points) -> tuple[np.ndarray, np.ndarray]:
    """Labels (minority iff score >= 0.5) and minority scores."""
    scores = predict_scores(model, points)
    labels = np.where(scores >= 0.5, ClassLabel.MINORITY, ClassLabel.MAJORITY).astype(np.int8)
    return labels, scores


# --- boosting -----------------------------------------------------------------

# alpha used for a perfect stump (eps = 0), which would otherwise be infinite
PERFECT_ALPHA = 0.5 * math.log((1 - 1e-10) / 1e-10)


@dataclass(frozen=True)
class Stump:
    """Predicts minority (+1) iff polarity * (x[feature_index] - threshold) > 0."""

    feature_index: int
    threshold: float
    polarity: int

    def __post_init__(self):
        if self.polarity not in (1, -1):
            raise ParameterError("polarity must be +1 or -1")
        if self.feature_index < 0:
            raise ParameterError("feature_index must be non-negative")

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        return np.where(self.polarity * (X[:, self.feature_index] - self.threshold) > 0, 1, -1)


@dataclass(frozen=True)
class BoostedModel:
    stumps: tuple = ()
    alphas: tuple = ()
    threshold_b: float = 0.0
    errors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "stumps", tuple(self.stumps))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "errors", tuple(float(e) for e in self.errors))
        if len(self.stumps) != len(self.alphas):
            raise ParameterError("stumps and alphas differ in length")
        if not all(math.isfinite(a) for a in self.alphas):
            raise ParameterError("alphas must be finite")

    def with_threshold(self, b: float) -> "BoostedModel":
        return BoostedModel(self.stumps, self.alphas, float(b), self.errors)

    def __add__(self, other: "BoostedModel") -> "BoostedModel":
        return BoostedModel(self.stumps + other.stumps, self.alphas + other.alphas,
                            self.threshold_b + other.threshold_b)


def _to_pm(labels) -> np.ndarray:
    return np.where(np.asarray(labels) == ClassLabel.MINORITY, 1, -1)


def stump_candidates(x: np.ndarray) -> np.ndarray:
    """Midpoints between consecutive distinct sorted values."""
    v = np.unique(x)
    if v.size < 2:
        return np.empty(0)
    a, b = v[:-1], v[1:]
    mid = (a + b) / 2
    return np.where((mid > a) & (mid < b), mid, a)


_TIE_TOL = 1e-12


def best_stump(X: np.ndarray, ypm: np.ndarray, w: np.ndarray) -> tuple[Optional[Stump], float]:
    """Exact minimum weighted-error stump.

    Ties (errors within 1e-12, weights summing to 1) go to the
    lexicographically smallest (feature, threshold, polarity), with polarity
    -1 ordered before +1.
    """
    best = None
    best_err = math.inf
    pos_w = np.where(ypm > 0, w, 0.0)
    neg_w = np.where(ypm < 0, w, 0.0)
    pos_total, neg_total = pos_w.sum(), neg_w.sum()
    for f in range(X.shape[1]):
        x = X[:, f]
        thr = stump_candidates(x)
        if thr.size == 0:
            continue
        order = np.argsort(x, kind="stable")
        xs = x[order]
        cpos = np.cumsum(pos_w[order])
        cneg = np.cumsum(neg_w[order])
        # number of points with x <= threshold
        n_left = np.searchsorted(xs, thr, side="right")
        left_pos = cpos[n_left - 1]
        left_neg = cneg[n_left - 1]
        err_plus = left_pos + (neg_total - left_neg)   # +1 to the right
        err_minus = left_neg + (pos_total - left_pos)  # +1 to the left
        errs = np.column_stack([err_minus, err_plus]).ravel()
        # round-off between equal sums must not decide a tie
        j = int(np.flatnonzero(errs <= errs.min() + _TIE_TOL)[0])
        if errs[j] < best_err - _TIE_TOL:
            best_err = float(errs[j])
            best = Stump(f, float(thr[j // 2]), -1 if j % 2 == 0 else 1)
    return best, best_err


def fit_adaboost(dataset: Dataset, rounds: int = 10, seed: int = 0) -> BoostedModel:
    """Discrete AdaBoost with exact best stumps.

    Stops early on a perfect stump (kept, with alpha capped) or when the best
    stump's weighted error reaches 0.5 (discarded).  ``seed`` is unused.
    """
    del seed
    if rounds < 1:
        raise ParameterError("rounds must be at least 1")
    n0, n1 = dataset.counts()
    if n0 == 0 or n1 == 0:
        raise ParameterError("AdaBoost needs both classes present")
    X = dataset.features
    ypm = _to_pm(dataset.labels)
    n = len(dataset)
    w = np.full(n, 1.0 / n)
    stumps, alphas, errors = [], [], []
    for _ in range(rounds):
        stump, _ = best_stump(X, ypm, w)
        if stump is None:
            break
        pred = stump.predict(X)
        eps = float(w[pred != ypm].sum())
        if eps >= 0.5 - _TIE_TOL:
            break
        if eps <= _TIE_TOL:
            stumps.append(stump)
            alphas.append(PERFECT_ALPHA)
            errors.append(0.0)
            break
        alpha = 0.5 * math.log((1 - eps) / eps)
        stumps.append(stump)
        alphas.append(alpha)
        errors.append(eps)
        w = w * np.exp(-alpha * ypm * pred)
        w /= w.sum()
    return BoostedModel(stumps, alphas, 0.0, errors)


def boosted_score(model: BoostedModel, points) -> np.ndarray:
    """sum_j alpha_j f_j(x) with f_j in {+1 minority, -1 majority}."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    score = np.zeros(X.shape[0])
    for stump, alpha in zip(model.stumps, model.alphas):
        score += alpha * stump.predict(X)
    return score


def boosted_predict(model: BoostedModel, points) -> np.ndarray:
    s = boosted_score(model, points) - model.threshold_b
    return np.where(s >= 0, ClassLabel.MINORITY, ClassLabel.MAJORITY).astype(np.int8)
