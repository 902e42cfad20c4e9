"""Sketch-and-solve for overdetermined least squares, plus the exact oracle.

``sketch_and_solve`` compresses ``M = (A | b)`` to ``F M`` with a sketch
operator, solves ``min_u ||(F A) u - F b||`` and scores ``x`` on the original
system. ``relative_residual`` divides by the exact optimum's residual, so 1
means optimal. ``check_embedding`` measures how well F preserves ``||M y||``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._random import make_rng
from .errors import DimensionError, RankDeficientError
from .linalg import RANK_TOL, as_matrix, as_vector, euclidean_norm, solve_least_squares, solve_min_norm
from .sketch import CostMeter, SketchOperator

log = logging.getLogger(__name__)

# Below this, ||A x - b|| counts as zero relative to ||b||.
CONSISTENT_TOL = 1e-12


class UnderdeterminedSketchWarning(UserWarning):
    """Sketch has fewer than d + 1 rows; the reduced problem loses information."""


class ConsistentSystemWarning(UserWarning):
    """Relative residual requested for a system whose optimum has zero residual."""


class LlspProblem:
    """Overdetermined system ``A x ~ b`` with ``A`` of shape ``m x d``, ``1 <= d < m``."""

    def __init__(self, a, b):
        self.a = as_matrix(a, "A")
        self.b = as_vector(b, "b")
        m, d = self.a.shape
        if self.b.size != m:
            raise DimensionError(f"b has length {self.b.size}, A has {m} rows")
        if not 1 <= d < m:
            raise DimensionError(f"need 1 <= d < m, got A of shape {m}x{d}")
        self._aug = None

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.a.shape[1]

    @property
    def augmented(self) -> np.ndarray:
        """``M = (A | b)``, shape ``m x (d + 1)``."""
        if self._aug is None:
            aug = np.hstack([self.a, self.b[:, None]])
            aug.flags.writeable = False
            self._aug = aug
        return self._aug

    def residual(self, x) -> float:
        return euclidean_norm(self.a @ np.asarray(x, dtype=np.float64) - self.b)

    def __repr__(self):
        return f"LlspProblem(m={self.m}, d={self.d})"


@dataclass
class Solution:
    x: np.ndarray
    residual: float
    relative_residual: float | None = None
    sketch_meta: dict | None = None
    flags: tuple = field(default=())


def solve_exact(p: LlspProblem, rank_tol: float = RANK_TOL) -> Solution:
    """Full QR solve of the original problem; its residual is the optimum."""
    x = solve_least_squares(p.a, p.b, rank_tol)
    return Solution(x=x, residual=p.residual(x), relative_residual=1.0)


def relative_residual(p: LlspProblem, x, exact: Solution) -> float:
    """``||A x - b|| / ||A x_opt - b||``.

    If the exact optimum has (numerically) zero residual the ratio is 1 when
    ``x`` also solves the system and ``inf`` otherwise; the latter emits a
    :class:`ConsistentSystemWarning`.
    """
    r = p.residual(x)
    bnorm = euclidean_norm(p.b)
    if exact.residual <= CONSISTENT_TOL * bnorm:
        if r <= CONSISTENT_TOL * bnorm:
            return 1.0
        warnings.warn("consistent-system degenerate: optimum residual is zero",
                      ConsistentSystemWarning, stacklevel=2)
        return math.inf
    return r / exact.residual


def sketch_and_solve(p: LlspProblem, op: SketchOperator, exact: Solution | None = None,
                     meter: CostMeter | None = None, rank_tol: float = RANK_TOL) -> Solution:
    """Solve the sketched problem ``min_u ||F A u - F b||``.

    The residual is measured on the original ``(A, b)``; pass ``exact`` (from
    :func:`solve_exact`) to also get the relative residual. With fewer than
    ``d + 1`` sketch rows a warning is issued; below ``d`` rows the
    minimum-norm solution of the wide reduced system is returned.
    """
    if op.m != p.m:
        raise DimensionError(f"sketch expects {op.m} rows, problem has {p.m}")
    meter = CostMeter() if meter is None else meter
    fm = op.apply(p.augmented, meter)
    fa, fb = fm[:, :-1], fm[:, -1]
    flags = []
    if op.s < p.d + 1:
        warnings.warn(f"sketch rows s={op.s} < d+1={p.d + 1}; reduced problem is underdetermined",
                      UnderdeterminedSketchWarning, stacklevel=2)
        flags.append("underdetermined")
    try:
        x = solve_least_squares(fa, fb, rank_tol) if op.s >= p.d else solve_min_norm(fa, fb, rank_tol)
    except RankDeficientError as err:
        raise RankDeficientError(err.index, "reduced problem is rank-deficient",
                                 context={"kind": op.kind.value, "s": op.s, "seed": op.seed}) from err
    meta = op.describe()
    meta["h"] = op.s / p.d
    meta["cost"] = meter.as_dict()
    sol = Solution(x=x, residual=p.residual(x), sketch_meta=meta, flags=tuple(flags))
    if exact is not None:
        sol.relative_residual = relative_residual(p, x, exact)
    return sol


@dataclass
class EmbeddingReport:
    epsilon: float
    probes: int
    ratio_min: float
    ratio_mean: float
    ratio_max: float
    violation_fraction: float
    normalization: float
    resamples: int = 0
    gamma_target: float | None = None

    @property
    def observed_gamma(self) -> float:
        return self.violation_fraction

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["observed_gamma"] = self.observed_gamma
        return d


def check_embedding(op: SketchOperator, mat, epsilon: float, probes: int, seed: int,
                    gamma_target: float | None = None, max_resamples: int = 1000) -> EmbeddingReport:
    """Empirical subspace-embedding distortion of ``op`` on ``range(mat)``.

    Draws Gaussian probe vectors ``y`` and records
    ``||F M y|| / (k ||M y||)`` with ``k = op.embedding_normalization()``
    (1 for a Gaussian sketch at its default scale, ``sqrt(s/m)`` for an
    orthonormal-row sketch). Probes with ``M y = 0`` are redrawn.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    mat = as_matrix(mat, "M")
    if not np.any(mat):
        raise ValueError("M must be nonzero")
    fm = op.apply(mat)
    k = op.embedding_normalization()
    rng = make_rng(seed, "embedding-probes")
    ratios = np.empty(probes)
    resamples = 0
    for i in range(probes):
        while True:
            y = rng.standard_normal(mat.shape[1])
            den = euclidean_norm(mat @ y)
            if den > 0:
                break
            resamples += 1
            if resamples > max_resamples:
                raise ArithmeticError("too many probes with M y = 0")
        ratios[i] = euclidean_norm(fm @ y) / (k * den)
    bad = (ratios < 1 - epsilon) | (ratios > 1 + epsilon)
    lo, hi = float(ratios.min()), float(ratios.max())
    return EmbeddingReport(
        epsilon=epsilon,
        probes=probes,
        ratio_min=lo,
        ratio_mean=min(max(float(ratios.mean()), lo), hi),
        ratio_max=hi,
        violation_fraction=float(bad.mean()),
        normalization=k,
        resamples=resamples,
        gamma_target=gamma_target,
    )
