"""EasyEnsemble and BalanceCascade.

Both build AdaBoost members on balanced subsets (a majority sample the size
of the minority class plus the whole minority class).  Predictions combine
the members' thresholded scores additively:

    F(x) = sign( sum_i (score_i(x) - b_i) )
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import ClassLabel, Dataset, ParameterError
from .learn import BoostedModel, boosted_score, fit_adaboost
from .rng import derive_seed, stream

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetaEnsemble:
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ParameterError("a meta-ensemble needs at least one member")


def _classes(dataset: Dataset):
    maj = np.flatnonzero(dataset.labels == ClassLabel.MAJORITY)
    mino = np.flatnonzero(dataset.labels == ClassLabel.MINORITY)
    if mino.size == 0:
        raise ParameterError("no minority points")
    if mino.size > maj.size:
        raise ParameterError(f"|S|={mino.size} exceeds |L|={maj.size}")
    return maj, mino


def _fit_member(dataset: Dataset, maj_subset: np.ndarray, mino: np.ndarray,
                rounds: int, seed: int) -> BoostedModel:
    rows = np.sort(np.concatenate([maj_subset, mino]))
    return fit_adaboost(dataset.subset(rows), rounds=rounds, seed=seed)


def easy_ensemble(dataset: Dataset, n_members: int = 10, rounds: int = 10,
                  seed: int = 0) -> MetaEnsemble:
    maj, mino = _classes(dataset)
    if n_members < 1:
        raise ParameterError("n_members must be at least 1")
    members = []
    for i in range(n_members):
        subset = stream(seed, "easy-ensemble", i).choice(maj, size=mino.size, replace=False)
        members.append(_fit_member(dataset, subset, mino, rounds,
                                   derive_seed(seed, "easy-ensemble", "fit", i)))
    return MetaEnsemble(members)


def cascade_fpr_target(r: float, n_members: int) -> float:
    """t = r^(1/(N-1))."""
    if n_members < 2:
        raise ParameterError("BalanceCascade needs at least 2 members")
    return r ** (1.0 / (n_members - 1))


def tune_threshold(scores: np.ndarray, t: float) -> float:
    """Smallest b from the score set with fraction(scores >= b) <= t.

    If even the largest score leaves too many points at or above it, the
    next float above the maximum is returned (no false positives).
    """
    s = np.sort(np.asarray(scores, dtype=np.float64))
    n = s.size
    if n == 0:
        raise ParameterError("cannot tune a threshold on an empty pool")
    uniq = np.unique(s)
    # count of scores >= each unique value
    at_or_above = n - np.searchsorted(s, uniq, side="left")
    ok = at_or_above <= t * n
    if ok.any():
        return float(uniq[np.argmax(ok)])
    return float(np.nextafter(s[-1], np.inf))


def balance_cascade(dataset: Dataset, n_members: int = 4, rounds: int = 10,
                    seed: int = 0) -> MetaEnsemble:
    """Sequential ensemble that discards majority points the members already get right.

    Each member's threshold b_i is tuned so its false positive rate on the
    current majority pool is at most t = r^(1/(N-1)); the pool then keeps
    only the points that member still scores at or above b_i.
    """
    maj, mino = _classes(dataset)
    t = cascade_fpr_target(mino.size / maj.size, n_members)
    pool = maj.copy()
    members = []
    for i in range(n_members):
        if pool.size < mino.size:
            log.info("balance_cascade: pool of %d < |S|=%d, stopping after %d members",
                     pool.size, mino.size, len(members))
            break
        subset = stream(seed, "balance-cascade", i).choice(pool, size=mino.size, replace=False)
        member = _fit_member(dataset, subset, mino, rounds,
                             derive_seed(seed, "balance-cascade", "fit", i))
        pool_scores = boosted_score(member, dataset.features[pool])
        b = tune_threshold(pool_scores, t)
        member = member.with_threshold(b)
        members.append(member)
        pool = pool[pool_scores >= b]
    return MetaEnsemble(members)


def meta_score(ensemble: MetaEnsemble, points) -> np.ndarray:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    total = np.zeros(X.shape[0])
    for m in ensemble.members:
        total += boosted_score(m, X) - m.threshold_b
    return total


def meta_predict(ensemble: MetaEnsemble, points) -> np.ndarray:
    """Minority iff the summed thresholded member scores are >= 0."""
    return np.where(meta_score(ensemble, points) >= 0,
                    ClassLabel.MINORITY, ClassLabel.MAJORITY).astype(np.int8)
