"""Minority-class oversampling: random duplication and the SMOTE family."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..core import Dataset, ParameterError, ResampleReport
from ..neighbors import knn_indices, self_knn
from ..rng import stream
from ._common import (append_rows, check_not_below_current, check_ratio, oversample_count,
                      report_for, split_classes)

log = logging.getLogger(__name__)


def random_oversample(dataset: Dataset, r_target: float = 0.5,
                      seed: int = 0) -> tuple[Dataset, ResampleReport]:
    """Append round(r_target*|L|) - |S| minority rows drawn with replacement."""
    r = check_ratio(r_target)
    maj, mino, maj_label, min_label = split_classes(dataset)
    check_not_below_current(maj.size, mino.size, r)
    n_add = oversample_count(maj.size, mino.size, r)
    picks = stream(seed, "random-over").choice(mino, size=n_add, replace=True)
    out = append_rows(dataset, dataset.features[picks], min_label)
    return out, report_for(dataset, out, maj_label, "random-over")


@dataclass(frozen=True)
class Synthetics:
    """Synthetic points plus where each one came from.

    ``base`` and ``neighbor`` are row indices into the source dataset and
    ``gap`` is the interpolation position along base -> neighbor.
    """

    points: np.ndarray
    base: np.ndarray
    neighbor: np.ndarray
    gap: np.ndarray


def _open_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.random(n)
    while True:
        zero = g == 0.0
        if not zero.any():
            return g
        g[zero] = rng.random(int(zero.sum()))


def interpolate(X: np.ndarray, bases: np.ndarray, candidates: np.ndarray, n_syn: int,
                rng: np.random.Generator, half_gap: np.ndarray | None = None) -> Synthetics:
    """Draw n_syn synthetic points.

    For each draw a base row is picked uniformly from ``bases``, a neighbour
    uniformly from that base's row of ``candidates`` (with replacement across
    draws), and a gap g uniform on (0, 1).  Where ``half_gap`` marks the
    chosen candidate, g is halved so the point stays nearer the base.
    """
    if n_syn == 0:
        empty = np.empty(0, dtype=np.intp)
        return Synthetics(np.empty((0, X.shape[1])), empty, empty, np.empty(0))
    pos = rng.integers(0, len(bases), size=n_syn)
    col = rng.integers(0, candidates.shape[1], size=n_syn)
    gap = _open_unit(rng, n_syn)
    if half_gap is not None:
        gap = np.where(half_gap[pos, col], 0.5 * gap, gap)
    base = bases[pos]
    nb = candidates[pos, col]
    pts = X[base] + gap[:, None] * (X[nb] - X[base])
    return Synthetics(pts, base, nb, gap)


def _check_smote_k(k: int, n_min: int) -> None:
    if n_min < 2:
        raise ParameterError("SMOTE needs at least 2 minority points to interpolate")
    if not 1 <= k <= n_min - 1:
        raise ParameterError(f"k must be in [1, |S|-1={n_min - 1}], got {k}")


def smote_synthetics(dataset: Dataset, k: int, r_target: float, seed: int,
                     tag: str = "smote") -> Synthetics:
    r = check_ratio(r_target)
    maj, mino, _, _ = split_classes(dataset)
    _check_smote_k(k, mino.size)
    check_not_below_current(maj.size, mino.size, r)
    n_syn = oversample_count(maj.size, mino.size, r)
    nn = mino[self_knn(dataset.features[mino], k)]
    return interpolate(dataset.features, mino, nn, n_syn, stream(seed, tag))


def smote(dataset: Dataset, k: int = 5, r_target: float = 0.5,
          seed: int = 0) -> tuple[Dataset, ResampleReport]:
    """SMOTE: interpolate between minority points and their k nearest minority neighbours."""
    _, _, maj_label, min_label = split_classes(dataset)
    syn = smote_synthetics(dataset, k, r_target, seed)
    out = append_rows(dataset, syn.points, min_label)
    return out, report_for(dataset, out, maj_label, "smote")


NOISE, SAFE, DANGER = "noise", "safe", "danger"


def danger_classification(dataset: Dataset, m: int) -> np.ndarray:
    """Label each minority point noise/safe/danger from its m nearest neighbours.

    With m' the number of majority points among them: m' == m is noise,
    m' < m/2 is safe, anything else is danger.  Returned in minority-index
    order (ascending row index).
    """
    maj, mino, maj_label, _ = split_classes(dataset)
    if not 1 <= m <= len(dataset) - 1:
        raise ParameterError(f"m must be in [1, n-1], got {m}")
    nn = knn_indices(dataset.features[mino], dataset.features, m, exclude=mino)
    m_prime = np.count_nonzero(dataset.labels[nn] == maj_label, axis=1)
    out = np.full(mino.size, DANGER, dtype=object)
    out[2 * m_prime < m] = SAFE
    out[m_prime == m] = NOISE
    return out


def borderline_synthetics(dataset: Dataset, variant: int, m: int, k: int,
                          r_target: float, seed: int) -> Synthetics:
    if variant not in (1, 2):
        raise ParameterError(f"Borderline-SMOTE variant must be 1 or 2, got {variant}")
    r = check_ratio(r_target)
    maj, mino, _, _ = split_classes(dataset)
    _check_smote_k(k, mino.size)
    check_not_below_current(maj.size, mino.size, r)
    kinds = danger_classification(dataset, m)
    danger = mino[kinds == DANGER]
    tag = f"bsmote{variant}"
    if danger.size == 0:
        log.info("%s: empty DANGER set, falling back to plain SMOTE", tag)
        return smote_synthetics(dataset, k, r, seed, tag=tag)

    X = dataset.features
    n_syn = oversample_count(maj.size, mino.size, r)
    pos_in_min = np.searchsorted(mino, danger)
    nn_min = mino[self_knn(X[mino], k)[pos_in_min]]
    if variant == 1:
        return interpolate(X, danger, nn_min, n_syn, stream(seed, tag))
    if k > maj.size:
        raise ParameterError(f"k={k} exceeds |L|={maj.size}")
    nn_maj = maj[knn_indices(X[danger], X[maj], k)]
    candidates = np.hstack([nn_min, nn_maj])
    half = np.zeros(candidates.shape, dtype=bool)
    half[:, k:] = True
    return interpolate(X, danger, candidates, n_syn, stream(seed, tag), half_gap=half)


def borderline_smote(dataset: Dataset, variant: int = 1, m: int = 10, k: int = 5,
                     r_target: float = 0.5, seed: int = 0) -> tuple[Dataset, ResampleReport]:
    """Borderline-SMOTE1/2: SMOTE seeded only from the DANGER set.

    Variant 2 may also interpolate towards one of the base's k nearest
    majority points, in which case the gap is drawn from (0, 0.5).
    """
    _, _, maj_label, min_label = split_classes(dataset)
    syn = borderline_synthetics(dataset, variant, m, k, r_target, seed)
    out = append_rows(dataset, syn.points, min_label)
    return out, report_for(dataset, out, maj_label, f"bsmote{variant}")
