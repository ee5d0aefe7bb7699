"""Resampling techniques for imbalanced binary classification."""

from .core import (ClassLabel, ConfusionMatrix, Dataset, EvalMetrics, ParameterError,
                   ResampleReport, class_partition, confusion, imbalance_ratio, metrics)

__version__ = "0.1.0"

__all__ = [
    "ClassLabel", "ConfusionMatrix", "Dataset", "EvalMetrics", "ParameterError",
    "ResampleReport", "class_partition", "confusion", "imbalance_ratio", "metrics",
]
