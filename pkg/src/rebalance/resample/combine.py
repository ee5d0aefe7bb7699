"""SMOTE followed by a cleaning step."""

from __future__ import annotations

from ..core import Dataset, ResampleReport
from ._common import report_for, split_classes
from .over import smote
from .under import TomekMode, enn_undersample, tomek_removal


def smote_tomek(dataset: Dataset, k: int = 5, r_target: float = 0.5,
                seed: int = 0) -> tuple[Dataset, ResampleReport]:
    _, _, maj_label, _ = split_classes(dataset)
    mid, _ = smote(dataset, k=k, r_target=r_target, seed=seed)
    out, _ = tomek_removal(mid, TomekMode.MAJORITY_ONLY)
    return out, report_for(dataset, out, maj_label, "smote-tomek")


def smote_enn(dataset: Dataset, k_smote: int = 5, k_enn: int = 5, r_target: float = 0.5,
              seed: int = 0) -> tuple[Dataset, ResampleReport]:
    _, _, maj_label, _ = split_classes(dataset)
    mid, _ = smote(dataset, k=k_smote, r_target=r_target, seed=seed)
    out, _ = enn_undersample(mid, k=k_enn)
    return out, report_for(dataset, out, maj_label, "smote-enn")
