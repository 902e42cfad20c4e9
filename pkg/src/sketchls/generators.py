"""Synthetic inputs: Gaussian and ill-conditioned matrices, noisy right-hand sides."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._random import make_rng
from .errors import DimensionError
from .linalg import as_matrix, euclidean_norm, householder_qr

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IllCondSpectrum:
    """Nonincreasing positive singular values for :func:`gen_illcond_input`."""

    sigma: tuple

    def __post_init__(self):
        sig = tuple(float(v) for v in self.sigma)
        if not sig or min(sig) <= 0:
            raise ValueError("singular values must be positive")
        if any(b > a for a, b in zip(sig, sig[1:])):
            raise ValueError("singular values must be nonincreasing")
        object.__setattr__(self, "sigma", sig)

    @classmethod
    def default(cls, d: int) -> "IllCondSpectrum":
        """``10**(5 - j)`` for ``j = 1..14``, then ``1e-10``."""
        return cls(tuple(10.0 ** (5 - j) if j <= 14 else 1e-10 for j in range(1, d + 1)))


@dataclass(frozen=True)
class RhsRecipe:
    noise_scale: float = 0.001

    def __post_init__(self):
        if not self.noise_scale > 0:
            raise ValueError("noise_scale must be positive")


def gen_gaussian_input(m: int, d: int, seed: int) -> np.ndarray:
    if not 1 <= d < m:
        raise DimensionError(f"need 1 <= d < m, got {m}x{d}")
    return as_matrix(make_rng(seed, "gaussian-input").standard_normal((m, d)))


def random_orthonormal(m: int, d: int, seed: int, *, stream: str = "orthonormal") -> np.ndarray:
    """``m x d`` matrix with orthonormal columns: Q factor of a Gaussian matrix."""
    if not 1 <= d <= m:
        raise DimensionError(f"need 1 <= d <= m, got {m}x{d}")
    g = make_rng(seed, stream).standard_normal((m, d))
    return as_matrix(householder_qr(g).q())


def gen_illcond_input(m: int, d: int, spectrum: IllCondSpectrum | None = None,
                      seed: int = 0) -> np.ndarray:
    """``A = U diag(sigma) V^T`` with thin random orthonormal ``U`` and ``V``."""
    if not 1 <= d < m:
        raise DimensionError(f"need 1 <= d < m, got {m}x{d}")
    spectrum = IllCondSpectrum.default(d) if spectrum is None else spectrum
    if len(spectrum.sigma) != d:
        raise DimensionError(f"spectrum has {len(spectrum.sigma)} values, need {d}")
    u, v = illcond_factors(m, d, seed)
    return as_matrix((u * np.asarray(spectrum.sigma)) @ v.T)


def illcond_factors(m: int, d: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``(U, V)`` pair :func:`gen_illcond_input` uses for ``seed``."""
    return (random_orthonormal(m, d, seed, stream="illcond-U"),
            random_orthonormal(d, d, seed, stream="illcond-V"))


def gen_rhs(a, recipe: RhsRecipe | None = None, seed: int = 0) -> np.ndarray:
    """``b = A w / ||A w|| + noise_scale * v / ||v||`` with Gaussian ``w``, ``v``."""
    signal, noise = rhs_components(a, recipe, seed)
    b = signal + noise
    b.flags.writeable = False
    return b


def rhs_components(a, recipe: RhsRecipe | None = None, seed: int = 0,
                   max_tries: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """The unit in-range part ``A w / ||A w||`` and the noise part of :func:`gen_rhs`."""
    a = as_matrix(a, "A")
    recipe = RhsRecipe() if recipe is None else recipe
    m, d = a.shape
    rng = make_rng(seed, "rhs")
    for tries in range(max_tries):
        aw = a @ rng.standard_normal(d)
        naw = euclidean_norm(aw)
        if naw > 0:
            break
        log.debug("A w = 0 on try %d, redrawing w", tries + 1)
    else:
        raise ValueError("A w = 0 for every draw; is A zero?")
    while True:
        v = rng.standard_normal(m)
        nv = euclidean_norm(v)
        if nv > 0:
            break
    return aw / naw, (recipe.noise_scale / nv) * v
