"""Brute-force reference implementations used as test oracles.

Plain Python loops over lists, written independently of the vectorised
library code.  Distances are accumulated left to right over coordinates,
the same order the library uses, so exact ties land identically.
"""

from __future__ import annotations

import math


def sqdist(a, b) -> float:
    s = 0.0
    for x, y in zip(a, b):
        s += (x - y) * (x - y)
    return s


def dist(a, b) -> float:
    return math.sqrt(sqdist(a, b))


def knn(q, refs, k, exclude=None):
    cands = [(sqdist(q, r), i) for i, r in enumerate(refs) if i != exclude]
    cands.sort()
    return [i for _, i in cands[:k]]


def kfarthest(q, refs, k, exclude=None):
    cands = [(-sqdist(q, r), i) for i, r in enumerate(refs) if i != exclude]
    cands.sort()
    return [i for _, i in cands[:k]]


def _classes(labels):
    n1 = sum(1 for v in labels if v == 1)
    n0 = len(labels) - n1
    maj_label = 1 if n1 > n0 else 0
    maj = [i for i, v in enumerate(labels) if v == maj_label]
    mino = [i for i, v in enumerate(labels) if v != maj_label]
    return maj, mino, maj_label


def tomek_pairs(X, labels):
    n = len(X)
    nn = [knn(X[i], X, 1, exclude=i)[0] for i in range(n)]
    return [(i, j) for i in range(n) for j in [nn[i]]
            if i < j and nn[j] == i and labels[i] != labels[j]]


def nearmiss_survivors(X, labels, variant, k, n_keep=None):
    """Majority row indices kept by NearMiss (sorted)."""
    maj, mino, _ = _classes(labels)
    if variant == 3:
        keep = set()
        for s in mino:
            ranked = sorted((sqdist(X[s], X[m]), m) for m in maj)
            keep.update(m for _, m in ranked[:k])
        return sorted(keep)
    scores = []
    for m in maj:
        ds = sorted(dist(X[m], X[s]) for s in mino)
        sel = ds[:k] if variant == 1 else ds[len(ds) - k:]
        total = 0.0
        for v in sel:
            total += v
        scores.append((total / k, m))
    scores.sort()
    return sorted(m for _, m in scores[:n_keep])


def enn_removed(X, labels, k):
    maj, _, maj_label = _classes(labels)
    out = []
    for m in maj:
        nn = knn(X[m], X, k, exclude=m)
        votes_min = sum(1 for j in nn if labels[j] != maj_label)
        if votes_min > k - votes_min:
            out.append(m)
    return out


def danger_kinds(X, labels, m):
    """noise/safe/danger per minority row (ascending row order)."""
    _, mino, maj_label = _classes(labels)
    out = []
    for s in mino:
        nn = knn(X[s], X, m, exclude=s)
        mp = sum(1 for j in nn if labels[j] == maj_label)
        if mp == m:
            out.append("noise")
        elif mp * 2 < m:
            out.append("safe")
        else:
            out.append("danger")
    return out


def cnn_keep(X, labels, first, orders_for_pass):
    """Trace of the condensing loop.

    ``first`` is the seed row of U; ``orders_for_pass(p, remaining)`` returns
    the visiting order of pass p over the sorted list of rows not in U.
    Returns the sorted kept rows (all minority + majority members of U).
    """
    _, mino, _ = _classes(labels)
    U = [first]
    p = 0
    while True:
        remaining = sorted(set(range(len(X))) - set(U))
        order = orders_for_pass(p, remaining)
        p += 1
        added = 0
        for i in order:
            best = min(U, key=lambda u: (sqdist(X[i], X[u]), u))
            if labels[best] != labels[i]:
                U.append(i)
                added += 1
        if added == 0:
            break
    return sorted(set(U) | set(mino))


def stump_errors(X, ypm, w):
    """Every (error, feature, threshold, polarity) candidate, exhaustively."""
    out = []
    d = len(X[0])
    for f in range(d):
        vals = sorted(set(row[f] for row in X))
        for a, b in zip(vals, vals[1:]):
            t = (a + b) / 2
            if not a < t < b:
                t = a
            for pol in (-1, 1):
                err = 0.0
                for row, yy, ww in zip(X, ypm, w):
                    pred = 1 if pol * (row[f] - t) > 0 else -1
                    if pred != yy:
                        err += ww
                out.append((err, f, t, pol))
    return out


def finite_difference_grad(fun, theta, h=1e-5):
    g = []
    for i in range(len(theta)):
        tp = list(theta)
        tm = list(theta)
        tp[i] += h
        tm[i] -= h
        g.append((fun(tp) - fun(tm)) / (2 * h))
    return g


def point_segment_distance(p, a, b) -> float:
    ab = [y - x for x, y in zip(a, b)]
    ap = [y - x for x, y in zip(a, p)]
    denom = sum(v * v for v in ab)
    t = 0.0 if denom == 0 else max(0.0, min(1.0, sum(u * v for u, v in zip(ap, ab)) / denom))
    proj = [x + t * v for x, v in zip(a, ab)]
    return dist(p, proj)
