"""Dense real linear algebra: validated storage, Householder QR, least squares.

Matrices and vectors are plain float64 numpy arrays, C-ordered (row-major)
and flagged read-only once they pass validation, so they can be shared
between concurrent trials without copying.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RankDeficientError

# |R_ii| <= RANK_TOL * max_j |R_jj| marks a numerically zero pivot. Machine
# epsilon, so the 1e-14-conditioned synthetic family still counts as full rank.
RANK_TOL = float(np.finfo(np.float64).eps)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a finite 2-D real matrix; return a read-only copy."""
    arr = np.array(a, dtype=np.float64, order="C", copy=True)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Validate ``v`` as a finite, non-empty 1-D real vector; return a read-only copy."""
    arr = np.array(v, dtype=np.float64, copy=True)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def euclidean_norm(v) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=np.float64).ravel()))


@dataclass(frozen=True)
class QrFactors:
    """Compact Householder QR of an ``rows x cols`` matrix (rows >= cols).

    Column ``k`` of ``reflectors`` holds the unit vector ``v_k`` in rows
    ``k:`` (zeros above); ``Q = H_0 H_1 ... H_{cols-1}`` with
    ``H_k = I - 2 v_k v_k^T``. A zero column ``v_k`` means no reflection.
    """

    reflectors: np.ndarray
    r: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.reflectors.shape

    @property
    def diag(self) -> np.ndarray:
        return np.diag(self.r).copy()

    def apply_qt(self, b: np.ndarray) -> np.ndarray:
        """Return ``Q_full^T b`` for a vector or a matrix with ``rows`` rows."""
        y = np.array(b, dtype=np.float64, copy=True)
        vec = y.ndim == 1
        if vec:
            y = y[:, None]
        if y.shape[0] != self.shape[0]:
            raise DimensionError(f"expected {self.shape[0]} rows, got {y.shape[0]}")
        for k in range(self.shape[1]):
            v = self.reflectors[k:, k]
            y[k:] -= 2.0 * np.outer(v, v @ y[k:])
        return y[:, 0] if vec else y

    def q(self) -> np.ndarray:
        """Explicit thin ``Q`` (``rows x cols``, orthonormal columns)."""
        m, n = self.shape
        q = np.zeros((m, n))
        q[np.arange(n), np.arange(n)] = 1.0
        for k in range(n - 1, -1, -1):
            v = self.reflectors[k:, k]
            q[k:, k:] -= 2.0 * np.outer(v, v @ q[k:, k:])
        return q

    def check_rank(self, tol: float = RANK_TOL) -> None:
        """Raise :class:`RankDeficientError` at the first negligible pivot."""
        d = np.abs(np.diag(self.r))
        top = d.max() if d.size else 0.0
        bad = np.flatnonzero(d <= tol * top) if top > 0 else np.arange(d.size)
        if bad.size:
            raise RankDeficientError(int(bad[0]))


def householder_qr(a) -> QrFactors:
    """Householder QR of a tall matrix.

    Raises :class:`DimensionError` when ``rows < cols``. The diagonal of
    ``R`` is left unchecked; use :meth:`QrFactors.check_rank` to detect rank
    deficiency.
    """
    w = np.array(as_matrix(a), copy=True)
    m, n = w.shape
    if m < n:
        raise DimensionError(f"householder_qr needs rows >= cols, got {m}x{n}")
    vs = np.zeros((m, n))
    for k in range(n):
        x = w[k:, k]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            continue
        alpha = -normx if x[0] >= 0 else normx
        v = x.copy()
        v[0] -= alpha
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        v /= nv
        w[k:, k:] -= 2.0 * np.outer(v, v @ w[k:, k:])
        w[k + 1:, k] = 0.0
        vs[k:, k] = v
    r = np.triu(w[:n, :])
    vs.flags.writeable = False
    r.flags.writeable = False
    return QrFactors(vs, r)


def back_substitute(r: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve ``r x = y`` for upper-triangular ``r``."""
    n = r.shape[0]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - r[i, i + 1:] @ x[i + 1:]) / r[i, i]
    return x


def forward_substitute(l: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve ``l x = y`` for lower-triangular ``l``."""
    n = l.shape[0]
    x = np.zeros(n)
    for i in range(n):
        x[i] = (y[i] - l[i, :i] @ x[:i]) / l[i, i]
    return x


def solve_least_squares(a, b, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Minimize ``||a x - b||_2`` for a tall, full-column-rank ``a`` via QR.

    Raises :class:`RankDeficientError` (carrying the offending column index)
    when a pivot of ``R`` is below ``rank_tol`` relative to the largest.
    """
    a = as_matrix(a, "a")
    b = as_vector(b, "b")
    if b.size != a.shape[0]:
        raise DimensionError(f"b has length {b.size}, expected {a.shape[0]}")
    f = householder_qr(a)
    f.check_rank(rank_tol)
    y = f.apply_qt(b)[: a.shape[1]]
    return back_substitute(f.r, y)


def solve_min_norm(a, b, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Minimum-norm solution of the wide system ``a x = b`` (rows < cols).

    Uses the QR factorization of ``a^T``: ``x = Q R^{-T} b``.
    """
    a = as_matrix(a, "a")
    b = as_vector(b, "b")
    if b.size != a.shape[0]:
        raise DimensionError(f"b has length {b.size}, expected {a.shape[0]}")
    f = householder_qr(a.T)
    f.check_rank(rank_tol)
    return f.q() @ forward_substitute(f.r.T, b)
