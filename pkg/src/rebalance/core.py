"""Datasets, class bookkeeping and the two headline metrics.

Labels are binary: 0 is the majority class ``L`` and 1 the minority class
``S``.  The two metrics reported everywhere are precision on ``L`` and
recall on ``S``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import tempfile
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import IntEnum
from pathlib import Path
from typing import Optional

import numpy as np


class ParameterError(ValueError):
    """Invalid parameter or precondition violation."""


class RatioUndefinedError(ParameterError):
    """Imbalance ratio requested for a dataset without majority points."""


class ClassLabel(IntEnum):
    MAJORITY = 0
    MINORITY = 1


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus binary labels.

    Arrays are copied on construction and frozen, so a Dataset can be shared
    freely.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64, copy=True)
        y = np.array(self.labels, copy=True)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise ParameterError(f"features must be 2-D, got shape {X.shape}")
        if X.shape[1] < 1:
            raise ParameterError("features need at least one column")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ParameterError(
                f"labels length {y.shape} does not match {X.shape[0]} feature rows")
        if not np.all(np.isfinite(X)):
            raise ParameterError("features contain NaN or infinity")
        if y.size and not np.all((y == 0) | (y == 1)):
            raise ParameterError("labels must be 0 (majority) or 1 (minority)")
        y = y.astype(np.int8)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def counts(self) -> tuple[int, int]:
        """Number of points labelled 0 and 1."""
        n1 = int(np.count_nonzero(self.labels))
        return len(self) - n1, n1

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[idx], self.labels[idx])

    def content_hash(self) -> str:

        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        return h.hexdigest()

    def equals(self, other: "Dataset") -> bool:
        return (self.features.shape == other.features.shape
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels))


def concat(a: Dataset, b: Dataset) -> Dataset:
    return Dataset(np.vstack([a.features, b.features]),
                   np.concatenate([a.labels, b.labels]))


def class_partition(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Split row indices into (majority, minority).

    The majority is the label with strictly more points; on a tie label 0
    is the majority.
    """
    y = dataset.labels
    idx0 = np.flatnonzero(y == 0)
    idx1 = np.flatnonzero(y == 1)
    if idx1.size > idx0.size:
        return idx1, idx0
    return idx0, idx1


def majority_label(dataset: Dataset) -> int:
    n0, n1 = dataset.counts()
    return 1 if n1 > n0 else 0


def imbalance_ratio(dataset: Dataset) -> float:
    maj, mino = class_partition(dataset)
    if maj.size == 0:
        raise RatioUndefinedError("dataset has no majority points")
    return mino.size / maj.size


@dataclass(frozen=True)
class ResampleReport:
    n_majority_before: int
    n_minority_before: int
    n_majority_after: int
    n_minority_after: int
    method: str = ""
    iterations: Optional[int] = None

    def __post_init__(self):
        for name in ("n_majority_before", "n_minority_before",
                     "n_majority_after", "n_minority_after"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")

    def to_text(self) -> str:
        lines = []
        if self.method:
            lines.append(f"method={self.method}")
        lines += [
            f"n_majority_before={self.n_majority_before}",
            f"n_minority_before={self.n_minority_before}",
            f"n_majority_after={self.n_majority_after}",
            f"n_minority_after={self.n_minority_after}",
        ]
        if self.iterations is not None:
            lines.append(f"iterations={self.iterations}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ResampleReport":
        kv = _parse_record(text)
        return cls(
            n_majority_before=int(kv["n_majority_before"]),
            n_minority_before=int(kv["n_minority_before"]),
            n_majority_after=int(kv["n_majority_after"]),
            n_minority_after=int(kv["n_minority_after"]),
            method=kv.get("method", ""),
            iterations=int(kv["iterations"]) if "iterations" in kv else None,
        )


def _parse_record(text: str) -> dict[str, str]:
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"malformed record line: {line!r}")
        kv[key.strip()] = value.strip()
    return kv


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion counts.

    ``fn_minority`` (minority predicted majority) is also the false-positive
    count of the majority class, and vice versa.
    """

    tp_minority: int
    fn_minority: int
    tp_majority: int
    fn_majority: int

    def __post_init__(self):
        if min(self.tp_minority, self.fn_minority, self.tp_majority, self.fn_majority) < 0:
            raise ParameterError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp_minority + self.fn_minority + self.tp_majority + self.fn_majority


@dataclass(frozen=True)
class EvalMetrics:
    precision_majority: Optional[float]
    recall_minority: Optional[float]


def confusion(y_true, y_pred) -> ConfusionMatrix:
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape:
        raise ParameterError("y_true and y_pred differ in shape")
    minority = t == ClassLabel.MINORITY
    pred_min = p == ClassLabel.MINORITY
    return ConfusionMatrix(
        tp_minority=int(np.count_nonzero(minority & pred_min)),
        fn_minority=int(np.count_nonzero(minority & ~pred_min)),
        tp_majority=int(np.count_nonzero(~minority & ~pred_min)),
        fn_majority=int(np.count_nonzero(~minority & pred_min)),
    )


def metrics(cm: ConfusionMatrix) -> EvalMetrics:
    """Precision on the majority class and recall on the minority class.

    A zero denominator yields ``None`` rather than 0.
    """
    pred_majority = cm.tp_majority + cm.fn_minority
    actual_minority = cm.tp_minority + cm.fn_minority
    precision = cm.tp_majority / pred_majority if pred_majority else None
    recall = cm.tp_minority / actual_minority if actual_minority else None
    return EvalMetrics(precision, recall)


def format_metric(value: Optional[float], places: int = 2) -> str:
    """Round half away from zero for display; absent values print as '-'."""
    if value is None:
        return "-"
    q = Decimal(1).scaleb(-places)
    d = Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP)
    return f"{d:.{places}f}"


# --- CSV --------------------------------------------------------------------

def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    d = dataset.n_features
    writer.writerow([f"f{i + 1}" for i in range(d)] + ["label"])
    for row, label in zip(dataset.features.tolist(), dataset.labels.tolist()):
        writer.writerow([repr(v) for v in row] + [int(label)])
    return buf.getvalue()


def dataset_from_csv(text: str) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParameterError("empty CSV") from None
    if not header or header[-1] != "label":
        raise ParameterError("CSV header must end with a 'label' column")
    d = len(header) - 1
    rows, labels = [], []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != d + 1:
            raise ParameterError(f"line {lineno}: expected {d + 1} fields, got {len(rec)}")
        rows.append([float(v) for v in rec[:d]])
        labels.append(int(rec[d]))
    X = np.array(rows, dtype=np.float64).reshape(len(rows), d)
    return Dataset(X, np.array(labels, dtype=np.int8))


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save_csv(dataset: Dataset, path) -> None:
    write_text_atomic(path, dataset_to_csv(dataset))


def load_csv(path) -> Dataset:
    return dataset_from_csv(Path(path).read_text(encoding="utf-8"))
