from __future__ import annotations

import math

import numpy as np

from ..core import Dataset, ParameterError, ResampleReport, class_partition

_SNAP = 1e-9


def snap_ceil(x: float) -> int:
    """ceil(x), except values within float noise of an integer snap to it."""
    r = round(x)
    if abs(x - r) <= _SNAP * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def snap_round(x: float) -> int:
    """Round half up; values within float noise of a half-integer count as halves."""
    half = math.floor(x) + 0.5
    if abs(x - half) <= _SNAP * max(1.0, abs(x)):
        return int(half + 0.5)
    return int(math.floor(x + 0.5))


def check_ratio(r_target: float) -> float:
    r = float(r_target)
    if not 0 < r <= 1:
        raise ParameterError(f"r_target must lie in (0, 1], got {r_target}")
    return r


def split_classes(dataset: Dataset):
    """(majority indices, minority indices, majority label, minority label)."""
    maj, mino = class_partition(dataset)
    if maj.size == 0 or mino.size == 0:
        raise ParameterError("both classes must be present")
    maj_label = int(dataset.labels[maj[0]])
    return maj, mino, maj_label, 1 - maj_label


def check_not_below_current(n_maj: int, n_min: int, r_target: float) -> None:
    current = n_min / n_maj
    if r_target < current and not math.isclose(r_target, current, rel_tol=_SNAP):
        raise ParameterError(
            f"r_target={r_target} is below the current ratio {current:.6g}; "
            "resampling cannot move the ratio that way")


def undersample_count(n_min: int, r_target: float) -> int:
    return snap_ceil(n_min / r_target)


def oversample_count(n_maj: int, n_min: int, r_target: float) -> int:
    return max(0, snap_round(r_target * n_maj) - n_min)


def report_for(before: Dataset, after: Dataset, maj_label: int, method: str,
               iterations: int | None = None) -> ResampleReport:
    def count(ds, label):
        return int(np.count_nonzero(ds.labels == label))

    return ResampleReport(
        n_majority_before=count(before, maj_label),
        n_minority_before=count(before, 1 - maj_label),
        n_majority_after=count(after, maj_label),
        n_minority_after=count(after, 1 - maj_label),
        method=method,
        iterations=iterations,
    )


def keep_rows(dataset: Dataset, keep_mask: np.ndarray) -> Dataset:
    return dataset.subset(np.flatnonzero(keep_mask))


def append_rows(dataset: Dataset, points: np.ndarray, label: int) -> Dataset:
    if len(points) == 0:
        return dataset
    X = np.vstack([dataset.features, np.asarray(points, dtype=np.float64)])
    y = np.concatenate([dataset.labels, np.full(len(points), label, dtype=np.int8)])
    return Dataset(X, y)
