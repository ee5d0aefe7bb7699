"""Exact Euclidean nearest-neighbour queries with deterministic ties.

Distances are compared as squared Euclidean distances.  Equal distances are
broken by ascending reference index, for both nearest and farthest queries.
Queries are processed in row chunks so memory stays bounded on a few
thousand points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, ParameterError

_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class NeighborQuery:
    reference_points: np.ndarray
    k: int
    exclude_self: bool = False


def sq_norm_last(diff: np.ndarray) -> np.ndarray:
    """Sum of squares over the last axis, accumulated left to right.

    The fixed summation order keeps exact distance ties reproducible.
    """
    out = diff[..., 0] * diff[..., 0]
    for j in range(1, diff.shape[-1]):
        out = out + diff[..., j] * diff[..., j]
    return out


def sq_distances(queries: np.ndarray, refs: np.ndarray) -> np.ndarray:
    """Squared distances from coordinate differences (no dot-product expansion)."""
    return sq_norm_last(queries[:, None, :] - refs[None, :, :])


def distances(queries: np.ndarray, refs: np.ndarray) -> np.ndarray:
    return np.sqrt(sq_distances(queries, refs))


def _chunks(n_queries: int, n_refs: int, d: int):
    step = max(1, _CHUNK_CELLS // max(1, n_refs * d))
    for start in range(0, n_queries, step):
        yield start, min(n_queries, start + step)


def _top_k_rows(key: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest entries per row, ordered by (key, index)."""
    n_rows, n_cols = key.shape
    if k == n_cols:
        return np.argsort(key, axis=1, kind="stable")
    part = np.argpartition(key, k - 1, axis=1)[:, :k]
    vals = np.take_along_axis(key, part, axis=1)
    kth = vals.max(axis=1)
    # a tie straddling the partition boundary needs the slow exact path
    n_le = np.count_nonzero(key <= kth[:, None], axis=1)
    out = np.empty((n_rows, k), dtype=np.intp)
    clean = n_le == k
    if np.any(clean):
        p = part[clean]
        v = vals[clean]
        out[clean] = np.take_along_axis(p, _lexsort_rows(v, p), axis=1)
    for r in np.flatnonzero(~clean):
        out[r] = np.argsort(key[r], kind="stable")[:k]
    return out


def _lexsort_rows(vals: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # sort by index first, then stable sort by value => (value, index) order
    o1 = np.argsort(idx, axis=1, kind="stable")
    v1 = np.take_along_axis(vals, o1, axis=1)
    o2 = np.argsort(v1, axis=1, kind="stable")
    return np.take_along_axis(o1, o2, axis=1)


def knn_indices(queries, refs, k: int, exclude=None, farthest: bool = False) -> np.ndarray:
    """k nearest (or farthest) references for each query row.

    ``exclude`` optionally gives, per query, one reference index to skip
    (use -1 for none); this is how a point is kept out of its own
    neighbourhood.
    """
    Q = np.asarray(queries, dtype=np.float64)
    R = np.asarray(refs, dtype=np.float64)
    if Q.ndim == 1:
        Q = Q.reshape(1, -1)
    if R.ndim != 2 or Q.shape[1] != R.shape[1]:
        raise ParameterError("query and reference dimensions differ")
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    available = R.shape[0] - (1 if exclude is not None else 0)
    if k > available:
        raise ParameterError(f"k={k} exceeds the {available} available reference points")
    ex = None if exclude is None else np.asarray(exclude, dtype=np.intp)
    out = np.empty((Q.shape[0], k), dtype=np.intp)
    for lo, hi in _chunks(Q.shape[0], R.shape[0], R.shape[1]):
        key = sq_distances(Q[lo:hi], R)
        if farthest:
            key = -key
        if ex is not None:
            rows = np.arange(hi - lo)
            sel = ex[lo:hi] >= 0
            key[rows[sel], ex[lo:hi][sel]] = np.inf
        out[lo:hi] = _top_k_rows(key, k)
    return out


def knn(query_point, query: NeighborQuery, self_index: int = -1) -> list[int]:
    """Indices of the k nearest references, ascending distance, ties by index."""
    exclude = [self_index] if query.exclude_self else None
    return knn_indices(query_point, query.reference_points, query.k, exclude=exclude)[0].tolist()


def kfarthest(query_point, query: NeighborQuery, self_index: int = -1) -> list[int]:
    exclude = [self_index] if query.exclude_self else None
    return knn_indices(query_point, query.reference_points, query.k,
                       exclude=exclude, farthest=True)[0].tolist()


def self_knn(points, k: int) -> np.ndarray:
    """k nearest neighbours of every point among the others (self excluded)."""
    P = np.asarray(points, dtype=np.float64)
    return knn_indices(P, P, k, exclude=np.arange(P.shape[0]))


def nearest_neighbor(points) -> np.ndarray:
    return self_knn(points, 1)[:, 0]


def mutual_nearest_cross_pairs(dataset: Dataset) -> list[tuple[int, int]]:
    """Tomek links: cross-class pairs that are each other's 1-NN."""
    if len(dataset) < 2:
        raise ParameterError("need at least 2 points")
    nn = nearest_neighbor(dataset.features)
    i = np.arange(len(dataset))
    j = nn
    mutual = (nn[j] == i) & (i < j) & (dataset.labels[i] != dataset.labels[j])
    return [(int(a), int(b)) for a, b in zip(i[mutual], j[mutual])]
