"""Regularized linear discriminant analysis on labelled embedding records.

Axes maximize between-class over within-class scatter. The within-class
scatter is ridge-regularized by shrinkage * trace/D (high-dimensional
embeddings with few samples per class leave it singular otherwise), and
the generalized eigenproblem is solved by symmetric whitening: Cholesky of
the regularized within-scatter, then a symmetric eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from ..errors import BadInput, DegenerateClasses, SingularScatter
from .embeddings import EmbeddingRecord


@dataclass(frozen=True)
class LdaModel:
    class_means: dict[str, np.ndarray]
    global_mean: np.ndarray
    within_scatter: np.ndarray
    between_scatter: np.ndarray
    shrinkage: float
    lambda_eff: float
    axes: np.ndarray  # shape (n_axes, D), unit-norm rows
    eigenvalues: np.ndarray

    @property
    def n_axes(self) -> int:
        return self.axes.shape[0]

    @property
    def dimension(self) -> int:
        return self.axes.shape[1]


def _sign_fix(axis: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    for component in axis:
        if abs(component) > tol:
            return axis if component > 0 else -axis
    return axis


def lda_fit(records: Sequence[EmbeddingRecord], shrinkage: float = 1e-3) -> LdaModel:
    """Fit LDA axes from labelled vectors.

    Returns min(#classes − 1, D) axes, unit-norm, sorted by descending
    eigenvalue, sign-fixed so each axis's first nonzero component is
    positive. Raises DegenerateClasses for <2 classes or a class with <2
    members, BadInput on non-finite vectors, SingularScatter when
    shrinkage is zero and the within-scatter cannot be factorized.
    """
    if shrinkage < 0:
        raise BadInput("shrinkage must be >= 0")
    by_class: dict[str, list[np.ndarray]] = {}
    for rec in records:
        by_class.setdefault(rec.class_label, []).append(np.asarray(rec.vector, dtype=np.float64))
    if len(by_class) < 2:
        raise DegenerateClasses(f"need >= 2 classes, got {len(by_class)}")
    for label, vectors in by_class.items():
        if len(vectors) < 2:
            raise DegenerateClasses(f"class {label!r} has {len(vectors)} member(s), need >= 2")

    X = np.vstack([v for vectors in by_class.values() for v in vectors])
    if not np.all(np.isfinite(X)):
        raise BadInput("non-finite values in embedding vectors")
    n, dim = X.shape
    global_mean = X.mean(axis=0)

    within = np.zeros((dim, dim))
    between = np.zeros((dim, dim))
    class_means: dict[str, np.ndarray] = {}
    for label, vectors in by_class.items():
        group = np.vstack(vectors)
        mu = group.mean(axis=0)
        class_means[label] = mu
        centered = group - mu
        within += centered.T @ centered
        offset = mu - global_mean
        between += len(vectors) * np.outer(offset, offset)

    lambda_eff = shrinkage * np.trace(within) / dim
    regularized = within + lambda_eff * np.eye(dim)
    try:
        chol = scipy.linalg.cholesky(regularized, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularScatter(f"within-class scatter not positive definite (lambda_eff={lambda_eff})") from exc

    # whiten: M = L^-1 Sb L^-T is symmetric, sharing eigenvalues with Sw^-1 Sb
    half = scipy.linalg.solve_triangular(chol, between, lower=True)
    whitened = scipy.linalg.solve_triangular(chol, half.T, lower=True).T
    whitened = 0.5 * (whitened + whitened.T)
    eigenvalues, eigenvectors = np.linalg.eigh(whitened)
    order = np.argsort(eigenvalues)[::-1]
    n_axes = min(len(by_class) - 1, dim)
    eigenvalues = np.maximum(eigenvalues[order][:n_axes], 0.0)
    # back-transform to the original space: a = L^-T v
    axes = scipy.linalg.solve_triangular(chol.T, eigenvectors[:, order[:n_axes]], lower=False).T
    axes = np.vstack([_sign_fix(a / np.linalg.norm(a)) for a in axes])

    return LdaModel(
        class_means=class_means,
        global_mean=global_mean,
        within_scatter=within,
        between_scatter=between,
        shrinkage=shrinkage,
        lambda_eff=float(lambda_eff),
        axes=axes,
        eigenvalues=eigenvalues,
    )


def lda_project(
    model: LdaModel,
    records: Sequence[EmbeddingRecord],
    axis_indices: Sequence[int] | None = None,
) -> np.ndarray:
    """Coordinates of records along the chosen axes: dot(x − global mean, axis).

    Returns an (n_records, n_selected_axes) array. Raises BadInput on a
    dimension mismatch or an invalid axis index.
    """
    if axis_indices is None:
        axis_indices = range(model.n_axes)
    axis_indices = list(axis_indices)
    for idx in axis_indices:
        if not (0 <= idx < model.n_axes):
            raise BadInput(f"axis index {idx} out of range [0, {model.n_axes})")
    if not records:
        return np.zeros((0, len(axis_indices)))
    X = np.vstack([rec.vector for rec in records])
    if X.shape[1] != model.dimension:
        raise BadInput(f"records of dimension {X.shape[1]}, model expects {model.dimension}")
    selected = model.axes[axis_indices]
    return (X - model.global_mean) @ selected.T
