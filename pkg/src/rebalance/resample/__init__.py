"""Under-, over- and combined resampling.

Every sampler takes a :class:`~rebalance.core.Dataset` and returns a new
dataset together with a :class:`~rebalance.core.ResampleReport`.
"""

from __future__ import annotations

from typing import Callable

from ..core import Dataset, ParameterError, ResampleReport
from .combine import smote_enn, smote_tomek
from .over import (DANGER, NOISE, SAFE, Synthetics, borderline_smote, borderline_synthetics,
                   danger_classification, interpolate, random_oversample, smote,
                   smote_synthetics)
from .under import (ConvergenceError, TomekMode, cnn_undersample, enn_removal_mask,
                    enn_undersample, nearmiss, nearmiss_scores, random_undersample,
                    renn_undersample, tomek_removal)

__all__ = [
    "DANGER", "NOISE", "SAFE", "METHODS", "ConvergenceError", "Synthetics", "TomekMode",
    "borderline_smote", "borderline_synthetics", "cnn_undersample", "danger_classification",
    "enn_removal_mask", "enn_undersample", "interpolate", "nearmiss", "nearmiss_scores",
    "random_oversample", "random_undersample", "renn_undersample", "resample", "smote",
    "smote_enn", "smote_synthetics", "smote_tomek", "tomek_removal",
]


def _ratio(fn):
    return lambda ds, k, r, seed: fn(ds, r_target=r, seed=seed)


# name -> (callable(dataset, k, r_target, seed), default k)
METHODS: dict[str, tuple[Callable[..., tuple[Dataset, ResampleReport]], int | None]] = {
    "random-under": (_ratio(random_undersample), None),
    "nearmiss1": (lambda ds, k, r, seed: nearmiss(ds, 1, k, r, seed), 3),
    "nearmiss2": (lambda ds, k, r, seed: nearmiss(ds, 2, k, r, seed), 3),
    "nearmiss3": (lambda ds, k, r, seed: nearmiss(ds, 3, k, r, seed), 3),
    "cnn": (lambda ds, k, r, seed: cnn_undersample(ds, seed), None),
    "enn": (lambda ds, k, r, seed: enn_undersample(ds, k), 5),
    "renn": (lambda ds, k, r, seed: renn_undersample(ds, k), 5),
    "tomek": (lambda ds, k, r, seed: tomek_removal(ds, TomekMode.MAJORITY_ONLY), None),
    "random-over": (_ratio(random_oversample), None),
    "smote": (lambda ds, k, r, seed: smote(ds, k, r, seed), 5),
    "bsmote1": (lambda ds, k, r, seed: borderline_smote(ds, 1, 10, k, r, seed), 5),
    "bsmote2": (lambda ds, k, r, seed: borderline_smote(ds, 2, 10, k, r, seed), 5),
    "smote-tomek": (lambda ds, k, r, seed: smote_tomek(ds, k, r, seed), 5),
    "smote-enn": (lambda ds, k, r, seed: smote_enn(ds, k, 5, r, seed), 5),
}


def resample(dataset: Dataset, method: str, k: int | None = None, r_target: float = 0.5,
             seed: int = 0) -> tuple[Dataset, ResampleReport]:
    """Run a sampler by its CLI name with that method's default k."""
    try:
        fn, default_k = METHODS[method]
    except KeyError:
        raise ParameterError(
            f"unknown method {method!r}; choose from {', '.join(METHODS)}") from None
    return fn(dataset, default_k if k is None else k, r_target, seed)
