"""Dense linear algebra primitives.

Matrices are plain 2-D ``numpy`` arrays of ``float64`` in numpy's default
row-major (C) order, shape ``(n_rows, n_cols)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import ConstantColumnError, RankDeficientError

#: relative pivot tolerance for the rank check in :func:`least_squares`
PIVOT_RTOL = 1e-10


@dataclass(frozen=True)
class StandardizationRecord:
    """Per-column centre and scale removed by :func:`standardize`."""

    center: np.ndarray
    scale: np.ndarray

    def apply(self, raw):
        raw = np.asarray(raw, dtype=float)
        return (raw - self.center) / self.scale


def _as_matrix(m):
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix must have at least one row")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or infinite values")
    return m


def standardize(m):
    """Centre every column to mean zero and scale it to unit Euclidean norm.

    Unit norm (rather than unit variance) makes ``X'r`` a vector of
    correlations up to the common factor ``||r||``.

    Returns
    -------
    data : ndarray of shape (n, p)
    record : StandardizationRecord

    Raises
    ------
    ConstantColumnError
        If any column holds a single repeated value.
    """
    m = _as_matrix(m)
    for j in range(m.shape[1]):
        col = m[:, j]
        if np.all(col == col[0]):
            raise ConstantColumnError(j)
    center = m.mean(axis=0)
    centered = m - center
    # second pass removes the rounding residue of the first mean
    resid = centered.mean(axis=0)
    centered -= resid
    center = center + resid
    scale = np.sqrt(np.einsum("ij,ij->j", centered, centered))
    if np.any(scale <= 0):
        raise ConstantColumnError(int(np.flatnonzero(scale <= 0)[0]))
    return centered / scale, StandardizationRecord(center=center, scale=scale)


def least_squares(xa, y):
    """Least-squares fit of ``y`` on the columns of ``xa``.

    Uses a Householder QR factorisation. A column whose ``|R_jj|`` falls
    below ``PIVOT_RTOL`` times the largest pivot is reported as dependent.

    Returns
    -------
    coef : ndarray of shape (p,)
    fitted : ndarray of shape (n,)
    """
    xa = _as_matrix(xa)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != xa.shape[0]:
        raise ValueError(
            f"y has shape {y.shape}, expected ({xa.shape[0]},)"
        )
    n, p = xa.shape
    if p == 0:
        return np.zeros(0), np.zeros(n)
    if p > n:
        raise RankDeficientError(n)
    q, r = np.linalg.qr(xa, mode="reduced")
    pivots = np.abs(np.diag(r))
    small = np.flatnonzero(pivots <= PIVOT_RTOL * pivots.max())
    if small.size:
        raise RankDeficientError(int(small[0]))
    qty = q.T @ y
    coef = solve_triangular(r, qty, lower=False)
    return coef, xa @ coef


def crossprod(m, v):
    """Return ``m' v``: the dot product of every column of ``m`` with ``v``."""
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    if m.ndim != 2 or v.ndim != 1 or v.shape[0] != m.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix {m.shape}, vector {v.shape}"
        )
    return m.T @ v
