"""SVG scatter plots with optional decision regions."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import ClassLabel, Dataset, ParameterError
from .ensemble import MetaEnsemble, meta_predict
from .learn import BoostedModel, LinearModel, boosted_predict, predict_logistic

WIDTH = HEIGHT = 600
MARGIN = 10
POINT_COLORS = {ClassLabel.MAJORITY: "#1f77b4", ClassLabel.MINORITY: "#d62728"}
REGION_COLORS = {ClassLabel.MAJORITY: "#dbe9f6", ClassLabel.MINORITY: "#f9d9d6"}


def predict_labels(model, X) -> np.ndarray:
    if isinstance(model, LinearModel):
        return predict_logistic(model, X)[0]
    if isinstance(model, BoostedModel):
        return boosted_predict(model, X)
    if isinstance(model, MetaEnsemble):
        return meta_predict(model, X)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def bounding_box(dataset: Dataset, pad: float = 0.10) -> tuple[float, float, float, float]:
    X = dataset.features
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    lo = lo - pad * span
    hi = hi + pad * span
    return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])


def lattice(dataset: Dataset, grid_res: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell-centre coordinates of a grid_res x grid_res lattice over the padded box."""
    x0, x1, y0, y1 = bounding_box(dataset)
    xs = x0 + (np.arange(grid_res) + 0.5) * (x1 - x0) / grid_res
    ys = y0 + (np.arange(grid_res) + 0.5) * (y1 - y0) / grid_res
    return xs, ys


def lattice_labels(model, dataset: Dataset, grid_res: int) -> np.ndarray:
    """Predicted label per lattice cell, shape (grid_res, grid_res) indexed [row=y, col=x]."""
    xs, ys = lattice(dataset, grid_res)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    return predict_labels(model, pts).reshape(grid_res, grid_res)


def _n(v: float) -> str:
    return f"{v:.3f}"


def render_plot(dataset: Dataset, model=None, grid_res: int = 100,
                title: Optional[str] = None) -> str:
    """Class-coloured scatter, with decision regions when a model is given."""
    if dataset.n_features != 2:
        raise ParameterError(
            f"plotting needs 2-D data, got {dataset.n_features} features; "
            "project with pca_project(dataset, 2) first")
    if grid_res < 1:
        raise ParameterError("grid_res must be positive")
    x0, x1, y0, y1 = bounding_box(dataset)
    inner_w = WIDTH - 2 * MARGIN
    inner_h = HEIGHT - 2 * MARGIN

    def px(x):
        return MARGIN + (x - x0) / (x1 - x0) * inner_w

    def py(y):
        return MARGIN + (y1 - y) / (y1 - y0) * inner_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')

    if model is not None:
        labels = lattice_labels(model, dataset, grid_res)
        cw = inner_w / grid_res
        ch = inner_h / grid_res
        out.append('<g id="regions" shape-rendering="crispEdges">')
        for r in range(grid_res):
            row = labels[r]
            # row r covers y from y0 + r*step upward; SVG y grows downward
            top = MARGIN + (grid_res - 1 - r) * ch
            start = 0
            for c in range(1, grid_res + 1):
                if c == grid_res or row[c] != row[start]:
                    color = REGION_COLORS[ClassLabel(int(row[start]))]
                    out.append(
                        f'<rect x="{_n(MARGIN + start * cw)}" y="{_n(top)}" '
                        f'width="{_n((c - start) * cw)}" height="{_n(ch)}" fill="{color}" '
                        f'data-label="{int(row[start])}"/>')
                    start = c
        out.append("</g>")

    out.append('<g id="points">')
    # majority first so minority points stay visible on top
    for label in (ClassLabel.MAJORITY, ClassLabel.MINORITY):
        color = POINT_COLORS[label]
        for x, y in dataset.features[dataset.labels == label]:
            out.append(f'<circle cx="{_n(px(x))}" cy="{_n(py(y))}" r="1.6" '
                       f'fill="{color}" fill-opacity="0.7"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
