"""Majority-class undersampling.

All functions return ``(new_dataset, report)`` and leave the input alone.
Surviving rows keep their original relative order.
"""

from __future__ import annotations

import logging
from enum import Enum

import numpy as np

from ..core import Dataset, ParameterError, ResampleReport
from ..neighbors import distances, knn_indices, mutual_nearest_cross_pairs, sq_norm_last
from ..rng import stream
from ._common import (check_not_below_current, check_ratio, keep_rows, report_for,
                      split_classes, undersample_count)

log = logging.getLogger(__name__)


def random_undersample(dataset: Dataset, r_target: float = 0.5,
                       seed: int = 0) -> tuple[Dataset, ResampleReport]:
    """Keep ceil(|S|/r_target) majority points drawn uniformly without replacement."""
    r = check_ratio(r_target)
    maj, mino, maj_label, _ = split_classes(dataset)
    check_not_below_current(maj.size, mino.size, r)
    n_keep = min(maj.size, undersample_count(mino.size, r))
    chosen = stream(seed, "random-under").choice(maj, size=n_keep, replace=False)
    keep = np.zeros(len(dataset), dtype=bool)
    keep[mino] = True
    keep[chosen] = True
    out = keep_rows(dataset, keep)
    return out, report_for(dataset, out, maj_label, "random-under")


def _sum_columns(a: np.ndarray) -> np.ndarray:
    s = a[:, 0].copy()
    for j in range(1, a.shape[1]):
        s += a[:, j]
    return s


def nearmiss_scores(dataset: Dataset, variant: int, k: int) -> np.ndarray:
    """Mean distance from each majority point to its k nearest (variant 1)
    or k farthest (variant 2) minority points.

    The k selected distances are summed in ascending order.
    """
    maj, mino, _, _ = split_classes(dataset)
    if not 1 <= k <= mino.size:
        raise ParameterError(f"k must be in [1, |S|={mino.size}], got {k}")
    X = dataset.features
    S = X[mino]
    scores = np.empty(maj.size)
    step = max(1, 2_000_000 // max(1, mino.size))
    for lo in range(0, maj.size, step):
        D = distances(X[maj[lo:lo + step]], S)
        if variant == 1:
            sel = np.partition(D, k - 1, axis=1)[:, :k]
        else:
            sel = np.partition(D, D.shape[1] - k, axis=1)[:, D.shape[1] - k:]
        scores[lo:lo + step] = _sum_columns(np.sort(sel, axis=1)) / k
    return scores


def nearmiss(dataset: Dataset, variant: int = 1, k: int = 3, r_target: float = 0.5,
             seed: int = 0) -> tuple[Dataset, ResampleReport]:
    """NearMiss-1/2/3 undersampling.

    Variants 1 and 2 keep the ceil(|S|/r_target) majority points with the
    lowest mean distance to their k nearest / k farthest minority points.
    Variant 3 keeps, for every minority point, its k nearest majority points,
    and ignores ``r_target``.  ``seed`` is unused; the method is deterministic.
    """
    del seed
    if variant not in (1, 2, 3):
        raise ParameterError(f"NearMiss variant must be 1, 2 or 3, got {variant}")
    maj, mino, maj_label, _ = split_classes(dataset)
    keep = np.zeros(len(dataset), dtype=bool)
    keep[mino] = True
    if variant == 3:
        if not 1 <= k <= maj.size:
            raise ParameterError(f"k must be in [1, |L|={maj.size}], got {k}")
        nn = knn_indices(dataset.features[mino], dataset.features[maj], k)
        keep[maj[np.unique(nn)]] = True
    else:
        r = check_ratio(r_target)
        check_not_below_current(maj.size, mino.size, r)
        n_keep = min(maj.size, undersample_count(mino.size, r))
        scores = nearmiss_scores(dataset, variant, k)
        keep[maj[np.argsort(scores, kind="stable")[:n_keep]]] = True
    out = keep_rows(dataset, keep)
    return out, report_for(dataset, out, maj_label, f"nearmiss{variant}")


def cnn_undersample(dataset: Dataset, seed: int = 0) -> tuple[Dataset, ResampleReport]:
    """Condensed nearest neighbour, undersampling the majority class only.

    U starts from one random minority point.  Each pass visits T - U in a
    fresh random order and adds every point whose current 1-NN in U carries
    the other label; passes repeat until one adds nothing.  The result is all
    of S plus the majority points that ended up in U.
    """
    maj, mino, maj_label, _ = split_classes(dataset)
    X = dataset.features
    y = dataset.labels
    n = len(dataset)

    u_x = np.empty_like(X)
    u_idx = np.empty(n, dtype=np.intp)
    u_y = np.empty(n, dtype=y.dtype)
    in_u = np.zeros(n, dtype=bool)

    first = int(stream(seed, "cnn", "start").choice(mino))
    u_x[0], u_idx[0], u_y[0] = X[first], first, y[first]
    in_u[first] = True
    m = 1

    n_pass = 0
    while True:
        order = stream(seed, "cnn", "pass", n_pass).permutation(np.flatnonzero(~in_u))
        n_pass += 1
        added = 0
        for i in order:
            d = sq_norm_last(u_x[:m] - X[i])
            j = int(np.argmin(d))
            ties = np.flatnonzero(d == d[j])
            if ties.size > 1:
                j = int(ties[np.argmin(u_idx[ties])])
            if u_y[j] != y[i]:
                u_x[m], u_idx[m], u_y[m] = X[i], i, y[i]
                in_u[i] = True
                m += 1
                added += 1
        if added == 0:
            break
    log.debug("cnn: %d passes, |U|=%d", n_pass, m)

    keep = in_u.copy()
    keep[mino] = True
    out = keep_rows(dataset, keep)
    return out, report_for(dataset, out, maj_label, "cnn", iterations=n_pass)


def _check_enn_k(k: int, n: int) -> None:
    if k < 1 or k % 2 == 0:
        raise ParameterError(f"ENN needs an odd positive k, got {k}")
    if k >= n:
        raise ParameterError(f"ENN needs k < n, got k={k}, n={n}")


def enn_removal_mask(dataset: Dataset, k: int, maj_label: int) -> np.ndarray:
    """Rows of the majority class whose k-NN vote is won by the minority."""
    X = dataset.features
    y = dataset.labels
    _check_enn_k(k, len(dataset))
    maj = np.flatnonzero(y == maj_label)
    remove = np.zeros(len(dataset), dtype=bool)
    if maj.size == 0:
        return remove
    nn = knn_indices(X[maj], X, k, exclude=maj)
    n_minority_votes = np.count_nonzero(y[nn] != maj_label, axis=1)
    remove[maj[2 * n_minority_votes > k]] = True
    return remove


def enn_undersample(dataset: Dataset, k: int = 5) -> tuple[Dataset, ResampleReport]:
    """Edited nearest neighbour on the majority class (one simultaneous pass)."""
    _, _, maj_label, _ = split_classes(dataset)
    out = keep_rows(dataset, ~enn_removal_mask(dataset, k, maj_label))
    return out, report_for(dataset, out, maj_label, "enn")


class ConvergenceError(RuntimeError):
    pass


def renn_undersample(dataset: Dataset, k: int = 5,
                     max_iters: int = 100) -> tuple[Dataset, ResampleReport]:
    """Repeat ENN on its own output until a pass removes nothing."""
    if max_iters < 1:
        raise ParameterError("max_iters must be at least 1")
    _, _, maj_label, _ = split_classes(dataset)
    current = dataset
    for it in range(1, max_iters + 1):
        remove = enn_removal_mask(current, k, maj_label)
        if not remove.any():
            return current, report_for(dataset, current, maj_label, "renn", iterations=it)
        current = keep_rows(current, ~remove)
    raise ConvergenceError(f"repeated ENN did not reach a fixpoint within {max_iters} passes")


class TomekMode(str, Enum):
    MAJORITY_ONLY = "majority"
    BOTH = "both"


def tomek_removal(dataset: Dataset, mode: TomekMode | str = TomekMode.MAJORITY_ONLY
                  ) -> tuple[Dataset, ResampleReport]:
    """Remove Tomek links: the majority member only, or both members."""
    mode = TomekMode(mode)
    _, _, maj_label, _ = split_classes(dataset)
    pairs = mutual_nearest_cross_pairs(dataset)
    keep = np.ones(len(dataset), dtype=bool)
    for a, b in pairs:
        if mode is TomekMode.BOTH:
            keep[a] = keep[b] = False
        else:
            keep[a if dataset.labels[a] == maj_label else b] = False
    out = keep_rows(dataset, keep)
    return out, report_for(dataset, out, maj_label, "tomek")
