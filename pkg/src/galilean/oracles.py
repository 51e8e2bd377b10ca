"""Brute-force reference computations used to check the closed forms.

Nothing here imports the closed-form code paths; each routine sums a power
series directly.
"""

from __future__ import annotations

import math

import numpy as np


def series_expm(M: np.ndarray, terms: int = 30, squarings: int | None = None) -> np.ndarray:
    """Matrix exponential by truncated Taylor series with scaling and squaring.

    ``squarings`` defaults to enough halvings to bring the 1-norm under
    1/16, and never fewer than 8.
    """
    M = np.asarray(M, dtype=float)
    if squarings is None:
        norm = np.abs(M).sum(axis=0).max()
        squarings = 8 if norm == 0 else max(8, int(math.ceil(math.log2(norm))) + 4)
    A = M / 2.0**squarings
    out = np.eye(M.shape[0])
    term = np.eye(M.shape[0])
    for n in range(1, terms + 1):
        term = term @ A / n
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def series_sum(K: np.ndarray, offset: int, terms: int = 30) -> np.ndarray:
    """``sum_{n=0}^{terms-1} K^n / (n + offset)!``."""
    K = np.asarray(K, dtype=float)
    out = np.zeros_like(K)
    power = np.eye(K.shape[0])
    for n in range(terms):
        out = out + power / math.factorial(n + offset)
        power = power @ K
    return out


def skew(phi) -> np.ndarray:
    x, y, z = (float(c) for c in phi)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def algebra_matrix(xi) -> np.ndarray:
    """5x5 algebra element built entry by entry from a ``(rho, nu, phi, iota)`` vector."""
    xi = np.asarray(xi, dtype=float)
    m = np.zeros((5, 5))
    m[:3, :3] = skew(xi[6:9])
    m[:3, 3] = xi[3:6]
    m[:3, 4] = xi[0:3]
    m[3, 4] = xi[9]
    return m


def algebra_vector(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m[:3, 4], m[:3, 3], [m[2, 1], m[0, 2], m[1, 0]], [m[3, 4]]])


def conjugation_adjoint(F: np.ndarray) -> np.ndarray:
    """10x10 adjoint assembled column by column from ``F E_k F^-1``."""
    Finv = np.linalg.inv(F)
    cols = [algebra_vector(F @ algebra_matrix(e) @ Finv) for e in np.eye(10)]
    return np.stack(cols, axis=1)


def commutator_ad(xi) -> np.ndarray:
    X = algebra_matrix(xi)
    cols = []
    for e in np.eye(10):
        Y = algebra_matrix(e)
        cols.append(algebra_vector(X @ Y - Y @ X))
    return np.stack(cols, axis=1)
