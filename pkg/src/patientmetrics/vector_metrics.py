"""Geometric and Hamming distances over equal-length sequences.

The scalar functions are the reference definitions. ``pairwise`` computes a
whole matrix row by row with numpy and is checked against them in the tests.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


class DimensionError(ValueError):
    pass


class ParameterError(ValueError):
    pass


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise DimensionError("empty vectors")
    return a, b


def euclidean(x, y) -> float:
    a, b = _pair(x, y)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def minkowski(x, y, p: float = 3) -> float:
    if not p >= 1:
        raise ParameterError(f"Minkowski order must be >= 1, got {p}")
    a, b = _pair(x, y)
    return float(np.sum(np.abs(a - b) ** p) ** (1.0 / p))


def manhattan(x, y) -> float:
    a, b = _pair(x, y)
    return float(np.sum(np.abs(a - b)))


def hamming(x: Sequence, y: Sequence) -> int:
    """Number of positions holding different symbols (strings or vectors)."""
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    return sum(1 for u, v in zip(x, y) if u != v)


def pairwise(rows: np.ndarray, metric: str, p: float = 3) -> np.ndarray:
    """Symmetric n x n distance matrix between the rows of ``rows``.

    Only the upper triangle is computed and then mirrored, so the result is
    exactly symmetric.
    """
    X = np.asarray(rows, dtype=float)
    if X.ndim != 2:
        raise DimensionError("expected a 2-D array of feature rows")
    if metric == "minkowski" and not p >= 1:
        raise ParameterError(f"Minkowski order must be >= 1, got {p}")
    n = X.shape[0]
    D = np.zeros((n, n))
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        if metric == "euclidean":
            d = np.sqrt(np.sum(diff ** 2, axis=1))
        elif metric == "minkowski":
            d = np.sum(np.abs(diff) ** p, axis=1) ** (1.0 / p)
        elif metric == "manhattan":
            d = np.sum(np.abs(diff), axis=1)
        elif metric == "hamming":
            d = np.count_nonzero(diff, axis=1).astype(float)
        else:
            raise ValueError(f"unknown vector metric {metric!r}")
        D[i, i + 1:] = d
    return D + D.T
