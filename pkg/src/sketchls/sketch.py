"""Sketch operators F (s x m) and their metered application to M = (A | b).

Four families:

* ``gaussian``   -- dense i.i.d. N(0, 1/s) entries, the comparison baseline.
* ``perm``       -- s distinct rows of a random m x m permutation matrix.
* ``block-perm`` -- c = m/s side-by-side copies of I_s, columns randomly
  permuted, normalized by 1/sqrt(c).
* ``asph``       -- R (H_8 kron I_{m/8}) D / sqrt(8): random signs D, the
  first three Sylvester-Hadamard butterfly levels, then s sampled rows.

Non-Gaussian operators are ``F = scale * Q`` with ``Q`` having orthonormal
rows (the row normalizations 1/sqrt(c) and 1/sqrt(8) belong to ``Q``);
``scale`` defaults to 1. The Gaussian operator is ``scale * G`` with ``G``
standard normal and ``scale`` defaulting to 1/sqrt(s).
When ``s`` does not divide ``m`` (block-perm) or 8 does not divide ``m``
(asph), the operator acts on ``m_padded`` rows and the input is implicitly
zero-padded; zero rows leave ``||M y||`` unchanged.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from ._random import make_rng, sample_without_replacement
from .errors import DimensionError

DENSE_LIMIT = 10**6


class SketchKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    PERM = "perm"
    BLOCK_PERM = "block-perm"
    ASPH = "asph"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name) -> "SketchKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown multiplier {name!r} (choose from {choices})") from None


@dataclass
class CostMeter:
    """Scalar operation and input-read counters for one ``apply`` call."""

    multiplies: int = 0
    adds: int = 0
    entries_read: int = 0

    def reset(self) -> None:
        self.multiplies = self.adds = self.entries_read = 0

    @property
    def scalar_ops(self) -> int:
        return self.multiplies + self.adds

    def as_dict(self) -> dict:
        return {
            "multiplies": self.multiplies,
            "adds": self.adds,
            "entries_read": self.entries_read,
            "scalar_ops": self.scalar_ops,
        }


def sylvester_hadamard(n: int) -> np.ndarray:
    """Unnormalized Sylvester-Hadamard matrix of order ``n`` (a power of two)."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"order must be a power of two, got {n}")
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


_H8 = sylvester_hadamard(8)


def _frozen(a, dtype=np.int64) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False, kw_only=True)
class SketchOperator:
    """Base class; use :func:`make_sketch` or a concrete subclass."""

    kind: ClassVar[SketchKind]

    m: int
    scale: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise DimensionError("m must be positive")
        if self.scale is None:
            object.__setattr__(self, "scale", self.default_scale())
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    # per-kind structure -------------------------------------------------
    @property
    def s(self) -> int:
        raise NotImplementedError

    @property
    def m_padded(self) -> int:
        return self.m

    @property
    def nnz(self) -> int:
        raise NotImplementedError

    def default_scale(self) -> float:
        return 1.0

    def _apply(self, mp: np.ndarray, meter: CostMeter) -> np.ndarray:
        raise NotImplementedError

    def _dense_unit(self) -> np.ndarray:
        raise NotImplementedError

    # public surface -----------------------------------------------------
    def scaled(self, alpha: float) -> "SketchOperator":
        """Copy with ``scale`` multiplied by ``alpha``."""
        return dataclasses.replace(self, scale=self.scale * alpha)

    def apply(self, mat, meter: CostMeter | None = None) -> np.ndarray:
        mat = np.asarray(mat, dtype=np.float64)
        vec = mat.ndim == 1
        if vec:
            mat = mat[:, None]
        if mat.ndim != 2 or mat.shape[0] != self.m:
            raise DimensionError(
                f"{self.kind.value} sketch expects {self.m} rows, got shape {mat.shape}"
            )
        if meter is None:
            meter = CostMeter()
        meter.reset()
        out = self._apply(mat, meter)
        return out[:, 0] if vec else out

    def as_dense(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        if self.s * self.m_padded > limit:
            raise ValueError(
                f"refusing to materialize {self.s}x{self.m_padded} sketch (> {limit} entries)"
            )
        return self.scale * self._dense_unit()

    def pad(self, mat) -> np.ndarray:
        """``mat`` with zero rows appended up to ``m_padded``."""
        mat = np.asarray(mat, dtype=np.float64)
        extra = self.m_padded - mat.shape[0]
        if extra == 0:
            return mat
        return np.concatenate([mat, np.zeros((extra,) + mat.shape[1:])])

    def embedding_normalization(self) -> float:
        """Factor that makes ``||F M y|| / (factor * ||M y||)`` concentrate at 1.

        For the Gaussian kind ``E ||F x||^2 = scale^2 s ||x||^2``; for the
        orthonormal-row kinds a Gaussian ``M`` gives
        ``E ||F M y||^2 = scale^2 (s / m_padded) E ||M y||^2``.
        """
        return self.scale * math.sqrt(self.s / self.m_padded)

    def describe(self) -> dict:
        return {"kind": self.kind.value, "s": self.s, "m": self.m,
                "m_padded": self.m_padded, "scale": self.scale, "seed": self.seed}


@dataclass(frozen=True, eq=False, kw_only=True)
class GaussianSketch(SketchOperator):
    kind: ClassVar[SketchKind] = SketchKind.GAUSSIAN
    gauss: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "gauss", _frozen(self.gauss, np.float64))
        if self.gauss.ndim != 2 or self.gauss.shape[1] != self.m:
            raise DimensionError("gaussian factor must be s x m")
        super().__post_init__()

    @property
    def s(self) -> int:
        return self.gauss.shape[0]

    @property
    def nnz(self) -> int:
        return self.gauss.size

    def default_scale(self) -> float:
        return 1.0 / math.sqrt(self.s)

    def embedding_normalization(self) -> float:
        return self.scale * math.sqrt(self.s)

    def _apply(self, mat, meter):
        s, m = self.gauss.shape
        cols = mat.shape[1]
        meter.entries_read += m * cols
        meter.multiplies += s * m * cols + s * cols
        meter.adds += s * (m - 1) * cols
        return self.scale * (self.gauss @ mat)

    def _dense_unit(self):
        return np.array(self.gauss)


@dataclass(frozen=True, eq=False, kw_only=True)
class PermSketch(SketchOperator):
    kind: ClassVar[SketchKind] = SketchKind.PERM
    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen(self.rows))
        r = self.rows
        if r.ndim != 1 or r.size < 1 or r.size > self.m:
            raise DimensionError(f"need 1 <= s <= m, got s={r.size}, m={self.m}")
        if r.min() < 0 or r.max() >= self.m or np.unique(r).size != r.size:
            raise ValueError("rows must be distinct indices in [0, m)")
        super().__post_init__()

    @property
    def s(self) -> int:
        return self.rows.size

    @property
    def nnz(self) -> int:
        return self.s

    def _apply(self, mat, meter):
        cols = mat.shape[1]
        meter.entries_read += self.s * cols
        out = mat[self.rows]
        if self.scale != 1.0:
            meter.multiplies += self.s * cols
            out = self.scale * out
        return out

    def _dense_unit(self):
        f = np.zeros((self.s, self.m))
        f[np.arange(self.s), self.rows] = 1.0
        return f


@dataclass(frozen=True, eq=False, kw_only=True)
class BlockPermSketch(SketchOperator):
    """``F[i, j] = scale`` iff ``perm[j] % s == i`` (columns of [I_s ... I_s] permuted)."""

    kind: ClassVar[SketchKind] = SketchKind.BLOCK_PERM
    block: int
    perm: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "perm", _frozen(self.perm))
        s, p = self.block, self.perm
        if not 1 <= s <= self.m:
            raise DimensionError(f"need 1 <= s <= m, got s={s}, m={self.m}")
        if p.size != self.m_padded or not np.array_equal(np.sort(p), np.arange(p.size)):
            raise ValueError(f"perm must be a permutation of range({self.m_padded})")
        super().__post_init__()

    @property
    def s(self) -> int:
        return self.block

    @property
    def m_padded(self) -> int:
        return -(-self.m // self.block) * self.block

    @property
    def copies(self) -> int:
        return self.m_padded // self.block

    @property
    def nnz(self) -> int:
        return self.m_padded

    @property
    def norm(self) -> float:
        return 1.0 / math.sqrt(self.copies)

    def _groups(self) -> np.ndarray:
        # row i of the result gathers the c input rows j with perm[j] % s == i
        target = self.perm % self.block
        return np.argsort(target, kind="stable").reshape(self.block, self.copies)

    def _apply(self, mat, meter):
        cols = mat.shape[1]
        groups = self._groups()
        real = (groups < self.m).sum(axis=1)
        meter.entries_read += self.m * cols
        meter.adds += int(np.maximum(real - 1, 0).sum()) * cols
        meter.multiplies += self.s * cols
        return (self.scale * self.norm) * self.pad(mat)[groups].sum(axis=1)

    def _dense_unit(self):
        f = np.zeros((self.s, self.m_padded))
        f[self.perm % self.block, np.arange(self.m_padded)] = self.norm
        return f


@dataclass(frozen=True, eq=False, kw_only=True)
class AsphSketch(SketchOperator):
    """Row-sampled ``(H_8 kron I_q) D`` with ``q = m_padded / 8``."""

    kind: ClassVar[SketchKind] = SketchKind.ASPH
    rows: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen(self.rows))
        object.__setattr__(self, "signs", _frozen(self.signs, np.float64))
        if self.signs.shape != (self.m_padded,) or not np.all(np.abs(self.signs) == 1.0):
            raise ValueError(f"signs must be {self.m_padded} entries of +-1")
        r = self.rows
        if r.ndim != 1 or r.size < 1 or r.size > self.m:
            raise DimensionError(f"need 1 <= s <= m, got s={r.size}, m={self.m}")
        if r.min() < 0 or r.max() >= self.m_padded or np.unique(r).size != r.size:
            raise ValueError("rows must be distinct indices in [0, m_padded)")
        super().__post_init__()

    @property
    def s(self) -> int:
        return self.rows.size

    @property
    def m_padded(self) -> int:
        return -(-self.m // 8) * 8

    @property
    def nnz(self) -> int:
        return 8 * self.s

    def _stencil(self):
        q = self.m_padded // 8
        blk, t = np.divmod(self.rows, q)
        idx = np.arange(8)[None, :] * q + t[:, None]
        return idx, _H8[blk] * self.signs[idx] / math.sqrt(8.0)

    def _apply(self, mat, meter):
        cols = mat.shape[1]
        idx, coef = self._stencil()
        meter.entries_read += int(np.unique(idx[idx < self.m]).size) * cols
        meter.multiplies += 8 * self.s * cols + 3 * coef.size
        meter.adds += 7 * self.s * cols
        coef = coef * self.scale
        return np.einsum("kb,kbc->kc", coef, self.pad(mat)[idx])

    def _dense_unit(self):
        idx, coef = self._stencil()
        f = np.zeros((self.s, self.m_padded))
        np.put_along_axis(f, idx, coef, axis=1)
        return f


def make_sketch(kind, s: int, m: int, seed: int) -> SketchOperator:
    """Draw a random operator of the given kind, deterministic in ``seed``."""
    kind = SketchKind.parse(kind)
    if s < 1 or m < 1:
        raise DimensionError(f"sketch dimensions must be positive, got s={s}, m={m}")
    if s > m:
        raise DimensionError(f"sketch rows s={s} exceed input rows m={m}")
    rng = make_rng(seed, kind.value)
    if kind is SketchKind.GAUSSIAN:
        return GaussianSketch(m=m, seed=seed, gauss=rng.standard_normal((s, m)))
    if kind is SketchKind.PERM:
        return PermSketch(m=m, seed=seed, rows=sample_without_replacement(rng, m, s))
    if kind is SketchKind.BLOCK_PERM:
        m_padded = -(-m // s) * s
        return BlockPermSketch(m=m, seed=seed, block=s, perm=rng.permutation(m_padded))
    m_padded = -(-m // 8) * 8
    signs = rng.choice(np.array([-1.0, 1.0]), size=m_padded)
    rows = sample_without_replacement(rng, m_padded, s)
    return AsphSketch(m=m, seed=seed, rows=rows, signs=signs)


def apply(op: SketchOperator, mat, meter: CostMeter | None = None) -> np.ndarray:
    """``F @ mat`` without materializing F; ``meter`` (if given) is reset then filled."""
    return op.apply(mat, meter)


def as_dense(op: SketchOperator, limit: int = DENSE_LIMIT) -> np.ndarray:
    """Materialize F as an ``s x m_padded`` array (test oracle for :func:`apply`)."""
    return op.as_dense(limit)
