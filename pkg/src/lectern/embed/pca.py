from __future__ import annotations

import numpy as np

from .base import DegenerateInput


def principal_directions(matrix: np.ndarray, out_dim: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Top ``out_dim`` eigenpairs of the sample covariance, largest first.

    Each direction is flipped so that its largest-magnitude coefficient is
    positive. Returns ``(eigenvalues, directions)`` with directions as columns.
    """
    x = np.asarray(matrix, dtype=np.float64)
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (x.shape[0] - 1)
    values, vectors = np.linalg.eigh(cov)
    order = np.argsort(values, kind="stable")[::-1][:out_dim]
    values = np.clip(values[order], 0.0, None)
    vectors = vectors[:, order]
    for j in range(vectors.shape[1]):
        pivot = np.argmax(np.abs(vectors[:, j]))
        if vectors[pivot, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return values, vectors


def pca_project(matrix: np.ndarray, out_dim: int = 2) -> np.ndarray:
    """Project rows onto the top principal directions (N x out_dim).

    Inputs with fewer than ``out_dim`` columns are zero-padded.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DegenerateInput("PCA projection needs at least two rows")
    _, directions = principal_directions(x, min(out_dim, x.shape[1]))
    projected = (x - x.mean(axis=0)) @ directions
    if projected.shape[1] < out_dim:
        pad = np.zeros((x.shape[0], out_dim - projected.shape[1]))
        projected = np.hstack([projected, pad])
    return projected
