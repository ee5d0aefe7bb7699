"""Synthetic two-class data in the style of a hypercube cluster generator.

Each class gets one Gaussian cluster centred on a vertex of a hypercube in
the informative subspace, distorted by its own random linear map.  Redundant
features are random linear combinations of the informative ones; any
remaining columns are pure noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, ParameterError
from .rng import stream


@dataclass(frozen=True)
class GenParams:
    n_samples: int = 10000
    weights: tuple[float, float] = (0.1, 0.9)
    class_sep: float = 1.2
    n_features: int = 5
    n_informative: int = 3
    n_redundant: int = 1
    n_clusters_per_class: int = 1
    label_noise: float = 0.01
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        self.validate()

    def validate(self) -> None:
        if self.n_samples < 2:
            raise ParameterError("n_samples must be at least 2")
        if len(self.weights) != 2 or min(self.weights) < 0:
            raise ParameterError("weights must be two non-negative fractions")
        if not math.isclose(sum(self.weights), 1.0, abs_tol=1e-9):
            raise ParameterError(f"weights must sum to 1, got {sum(self.weights)}")
        if self.class_sep <= 0:
            raise ParameterError("class_sep must be positive")
        for name in ("n_features", "n_informative", "n_redundant", "n_clusters_per_class"):
            if getattr(self, name) < 0 or (name != "n_redundant" and getattr(self, name) < 1):
                raise ParameterError(f"{name} must be positive")
        if self.n_informative + self.n_redundant > self.n_features:
            raise ParameterError("n_informative + n_redundant exceeds n_features")
        if self.n_clusters_per_class != 1:
            raise ParameterError("only one cluster per class is supported")
        if not 0 <= self.label_noise < 1:
            raise ParameterError("label_noise must lie in [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def class_sizes(params: GenParams) -> tuple[int, int]:
    """Per generator-class sizes; the rounding remainder goes to the larger class."""
    sizes = [_round_half_up(w * params.n_samples) for w in params.weights]
    big = 0 if params.weights[0] > params.weights[1] else 1
    sizes[big] += params.n_samples - sum(sizes)
    return sizes[0], sizes[1]


def _invertible_map(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        A = 2 * rng.random((n, n)) - 1
        if abs(np.linalg.det(A)) > 1e-6:
            return A


def generate(params: GenParams) -> Dataset:
    """Draw a dataset; a pure function of ``params`` (seed included)."""
    params.validate()
    rng = stream(params.seed, "datagen")
    n_inf = params.n_informative
    sizes = class_sizes(params)

    n_vertices = 2 ** n_inf
    if n_vertices < 2:
        raise ParameterError("need at least one informative feature")
    picks = rng.choice(n_vertices, size=2, replace=False)
    bits = (picks[:, None] >> np.arange(n_inf)[None, :]) & 1
    centroids = (2.0 * bits - 1.0) * params.class_sep

    blocks = []
    for c in range(2):
        Z = rng.standard_normal((sizes[c], n_inf))
        A = _invertible_map(rng, n_inf)
        blocks.append(Z @ A + centroids[c])
    informative = np.vstack(blocks)
    gen_class = np.repeat([0, 1], sizes)

    cols = [informative]
    if params.n_redundant:
        B = 2 * rng.random((n_inf, params.n_redundant)) - 1
        cols.append(informative @ B)
    n_noise = params.n_features - n_inf - params.n_redundant
    if n_noise:
        cols.append(rng.standard_normal((params.n_samples, n_noise)))
    X = np.hstack(cols)

    # the larger generator class becomes label 0 (majority)
    major = 0 if sizes[0] > sizes[1] else (1 if sizes[1] > sizes[0] else 0)
    y = (gen_class != major).astype(np.int8)

    n_flip = _round_half_up(params.label_noise * params.n_samples)
    if n_flip:
        flip = rng.choice(params.n_samples, size=n_flip, replace=False)
        y[flip] = 1 - y[flip]

    order = rng.permutation(params.n_samples)
    return Dataset(X[order], y[order])


# --- PCA ------------------------------------------------------------------

def jacobi_eigh(S: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` sorted by descending eigenvalue;
    eigenvectors are columns.
    """
    A = np.array(S, dtype=np.float64, copy=True)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ParameterError("jacobi_eigh needs a symmetric square matrix")
    V = np.eye(n)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.sqrt(np.sum(A[off_mask] ** 2)) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                A[p, q] = A[q, p] = 0.0
                V = V @ J
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    evals = np.diag(A).copy()
    order = np.argsort(-evals, kind="stable")
    return evals[order], V[:, order]


@dataclass(frozen=True)
class PCAProjection:
    mean: np.ndarray
    components: np.ndarray  # d x k, columns are loadings
    eigenvalues: np.ndarray = field(repr=False)

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) @ self.components


def fit_pca(dataset: Dataset, k: int) -> PCAProjection:
    X = dataset.features
    n, d = X.shape
    if not 1 <= k <= d:
        raise ParameterError(f"k must be in [1, {d}], got {k}")
    if n < 2:
        raise ParameterError("PCA needs at least 2 points")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (n - 1)
    evals, evecs = jacobi_eigh((cov + cov.T) / 2)
    comps = evecs[:, :k].copy()
    for j in range(k):
        lead = np.argmax(np.abs(comps[:, j]))
        if comps[lead, j] < 0:
            comps[:, j] = -comps[:, j]
    return PCAProjection(mean, comps, evals[:k])


def pca_project(dataset: Dataset, k: int) -> Dataset:
    """Centre and project onto the k leading principal axes; labels unchanged."""
    proj = fit_pca(dataset, k)
    return Dataset(proj.transform(dataset.features), dataset.labels)
