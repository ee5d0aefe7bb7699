"""Experimental protocol: stratified split, k-fold model selection, benchmark runner.

A benchmark run generates the synthetic data, projects it onto two principal
components, splits it 70/30 and then, per method, resamples (or reweights,
or builds an ensemble on) the training split only and scores the untouched
test split.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import statistics
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (Dataset, ParameterError, class_partition, confusion,
                   format_metric, metrics)
from .datagen import GenParams, generate, pca_project
from .ensemble import balance_cascade, easy_ensemble, meta_predict
from .learn import ConvergenceError, Penalty, balanced_weights, fit_logistic, predict_logistic
from .resample import METHODS as SAMPLERS
from .resample import resample
from .rng import derive_seed, stream

log = logging.getLogger(__name__)

STRENGTH_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
PENALTY_GRID = (Penalty.L2, Penalty.L1)
DEFAULT_GRID = tuple((s, p) for s in STRENGTH_GRID for p in PENALTY_GRID)

ALL_METHODS = (
    "baseline", "weighted",
    "random-under", "nearmiss1", "nearmiss2", "nearmiss3", "cnn", "enn", "renn", "tomek",
    "random-over", "smote", "bsmote1", "bsmote2",
    "smote-tomek", "smote-enn",
    "easy-ensemble", "balance-cascade",
)
ENSEMBLE_METHODS = ("easy-ensemble", "balance-cascade")

CSV_HEADER = ("method", "precision_L", "recall_S", "n_L_after", "n_S_after", "seed")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ParameterError("train_fraction must lie in (0, 1)")
        if self.folds < 2:
            raise ParameterError("folds must be at least 2")


@dataclass(frozen=True)
class BenchmarkRow:
    method: str
    precision_majority: Optional[float]
    recall_minority: Optional[float]
    n_majority_after: Optional[int]
    n_minority_after: Optional[int]
    seed: int
    test_hash: str = ""
    error: str = ""


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Per-class shuffled split; both sides keep at least one point of each class."""
    rng = stream(spec.seed, "split")
    train_rows = []
    for label in (0, 1):
        idx = np.flatnonzero(dataset.labels == label)
        if idx.size < 2:
            raise ParameterError(f"class {label} has {idx.size} points; need at least 2 to split")
        n_train = min(max(_round_half_up(spec.train_fraction * idx.size), 1), idx.size - 1)
        train_rows.append(rng.permutation(idx)[:n_train])
    train_mask = np.zeros(len(dataset), dtype=bool)
    train_mask[np.concatenate(train_rows)] = True
    return dataset.subset(np.flatnonzero(train_mask)), dataset.subset(np.flatnonzero(~train_mask))


def kfold_indices(dataset: Dataset, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified folds as (train_indices, validation_indices) pairs."""
    if folds < 2:
        raise ParameterError("folds must be at least 2")
    _, mino = class_partition(dataset)
    if folds > mino.size:
        raise ParameterError(f"{folds} folds exceed the {mino.size} minority points")
    rng = stream(seed, "kfold")
    per_fold = [[] for _ in range(folds)]
    for label in (0, 1):
        idx = rng.permutation(np.flatnonzero(dataset.labels == label))
        for f, part in enumerate(np.array_split(idx, folds)):
            per_fold[f].append(part)
    out = []
    all_idx = np.arange(len(dataset))
    for parts in per_fold:
        val = np.sort(np.concatenate(parts))
        out.append((np.setdiff1d(all_idx, val, assume_unique=True), val))
    return out


def macro_f1(y_true, y_pred) -> float:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    scores = []
    for label in (0, 1):
        tp = np.count_nonzero((y_true == label) & (y_pred == label))
        fp = np.count_nonzero((y_true != label) & (y_pred == label))
        fn = np.count_nonzero((y_true == label) & (y_pred != label))
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return float(np.mean(scores))


def grid_search_logistic(train: Dataset, spec: SplitSpec, balanced: bool = False,
                         grid: Sequence[tuple[float, Penalty | str]] = DEFAULT_GRID
                         ) -> tuple[Penalty, float]:
    """Pick (penalty, strength) by mean validation macro-F1 over stratified folds.

    Ties go to the smaller strength, then to L2.  A candidate whose fit fails
    to converge on any fold is disqualified.
    """
    if not grid:
        raise ParameterError("empty parameter grid")
    folds = [(train.subset(tr), train.subset(va))
             for tr, va in kfold_indices(train, spec.folds, spec.seed)]
    candidates = sorted({(float(s), Penalty(p)) for s, p in grid},
                        key=lambda c: (c[0], c[1] is not Penalty.L2))
    best, best_score = None, -math.inf
    for strength, penalty in candidates:
        scores = []
        try:
            for fit_ds, val_ds in folds:
                cw = balanced_weights(fit_ds) if balanced else None
                model = fit_logistic(fit_ds, penalty, strength, cw)
                pred, _ = predict_logistic(model, val_ds.features)
                scores.append(macro_f1(val_ds.labels, pred))
        except ConvergenceError as exc:
            log.warning("grid candidate %s C=%g disqualified: %s", penalty.value, strength, exc)
            continue
        mean = float(np.mean(scores))
        if mean > best_score:
            best, best_score = (penalty, strength), mean
    if best is None:
        raise ConvergenceError("every grid candidate failed to converge")
    return best


def _logistic_row_predictions(train: Dataset, test: Dataset, spec: SplitSpec,
                              balanced: bool) -> np.ndarray:
    penalty, strength = grid_search_logistic(train, spec, balanced=balanced)
    cw = balanced_weights(train) if balanced else None
    model = fit_logistic(train, penalty, strength, cw)
    pred, _ = predict_logistic(model, test.features)
    return pred


def run_method(name: str, train: Dataset, test: Dataset, spec: SplitSpec, seed: int,
               k: Optional[int] = None, r_target: float = 0.5) -> BenchmarkRow:
    """Evaluate one method; the test split is only ever used for prediction."""
    method_seed = derive_seed(seed, "method", name)
    n_after: tuple[Optional[int], Optional[int]] = (None, None)
    if name in ("baseline", "weighted"):
        pred = _logistic_row_predictions(train, test, spec, balanced=(name == "weighted"))
        n_after = train.counts()
    elif name in SAMPLERS:
        resampled, report = resample(train, name, k=k, r_target=r_target, seed=method_seed)
        pred = _logistic_row_predictions(resampled, test, spec, balanced=False)
        n_after = (report.n_majority_after, report.n_minority_after)
    elif name == "easy-ensemble":
        pred = meta_predict(easy_ensemble(train, seed=method_seed), test.features)
    elif name == "balance-cascade":
        pred = meta_predict(balance_cascade(train, seed=method_seed), test.features)
    else:
        raise ParameterError(f"unknown method {name!r}; choose from {', '.join(ALL_METHODS)}")
    m = metrics(confusion(test.labels, pred))
    return BenchmarkRow(name, m.precision_majority, m.recall_minority,
                        n_after[0], n_after[1], seed, test.content_hash())


def run_benchmark(gen_params: GenParams = GenParams(), spec: SplitSpec = SplitSpec(),
                  method_list: Iterable[str] = ALL_METHODS, seed: int = 0,
                  k: Optional[int] = None, r_target: float = 0.5) -> list[BenchmarkRow]:
    """Run every method on one generated dataset; rows follow ``method_list`` order.

    ``seed`` is the master seed: it replaces ``gen_params.seed`` and
    ``spec.seed`` is derived from it, as are the per-method seeds.
    """
    methods = list(method_list)
    for name in methods:
        if name not in ALL_METHODS:
            raise ParameterError(f"unknown method {name!r}; choose from {', '.join(ALL_METHODS)}")
    data = pca_project(generate(replace(gen_params, seed=seed)), 2)
    spec = replace(spec, seed=derive_seed(seed, "split"))
    train, test = stratified_split(data, spec)
    test_hash = test.content_hash()
    rows = []
    for name in methods:
        try:
            row = run_method(name, train, test, spec, seed, k=k, r_target=r_target)
        except Exception as exc:  # noqa: BLE001 - a failing method must not abort the run
            log.error("method %s failed: %s", name, exc)
            row = BenchmarkRow(name, None, None, None, None, seed, test_hash,
                               error=f"{type(exc).__name__}: {exc}")
        if row.test_hash != test_hash:
            raise AssertionError(f"test split changed while running {name}")
        rows.append(row)
    return rows


# --- output -------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Iterable[BenchmarkRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.method, _fmt(r.precision_majority), _fmt(r.recall_minority),
                    _fmt(r.n_majority_after), _fmt(r.n_minority_after), r.seed])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[BenchmarkRow]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ParameterError(f"unexpected benchmark header {header}")

    def opt(v, cast):
        return cast(v) if v != "" else None

    rows = []
    for rec in reader:
        if not rec:
            continue
        method, p, r, nl, ns, seed = rec
        p, r = opt(p, float), opt(r, float)
        for v in (p, r):
            if v is not None and not 0 <= v <= 1:
                raise ParameterError(f"metric {v} outside [0, 1] in row {rec}")
        rows.append(BenchmarkRow(method, p, r, opt(nl, int), opt(ns, int), int(seed)))
    return rows


def median_by_method(rows: Iterable[BenchmarkRow]) -> dict[str, tuple[Optional[float], Optional[float]]]:
    """Median precision_L / recall_S per method across seeds (absent values skipped)."""
    grouped: dict[str, tuple[list, list]] = {}
    for r in rows:
        p, q = grouped.setdefault(r.method, ([], []))
        if r.precision_majority is not None:
            p.append(r.precision_majority)
        if r.recall_minority is not None:
            q.append(r.recall_minority)
    return {m: (statistics.median(p) if p else None, statistics.median(q) if q else None)
            for m, (p, q) in grouped.items()}


def format_table(rows: Iterable[BenchmarkRow]) -> str:
    lines = [f"{'method':<16} {'prec_L':>6} {'rec_S':>6} {'|L|':>6} {'|S|':>6} {'seed':>5}"]
    for r in rows:
        nl = "" if r.n_majority_after is None else r.n_majority_after
        ns = "" if r.n_minority_after is None else r.n_minority_after
        line = (f"{r.method:<16} {format_metric(r.precision_majority):>6} "
                f"{format_metric(r.recall_minority):>6} {nl!s:>6} {ns!s:>6} {r.seed:>5}")
        if r.error:
            line += f"  ! {r.error}"
        lines.append(line)
    return "\n".join(lines) + "\n"
