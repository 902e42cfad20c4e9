import math

import numpy as np
import pytest

from sketchls.errors import DimensionError
from sketchls.generators import (
    IllCondSpectrum,
    RhsRecipe,
    gen_gaussian_input,
    gen_illcond_input,
    gen_rhs,
    illcond_factors,
    random_orthonormal,
    rhs_components,
)
from sketchls.solver import LlspProblem, solve_exact


def test_gaussian_input_full_shape():
    a = gen_gaussian_input(4096, 50, 0)
    assert a.shape == (4096, 50)


def test_gaussian_input_deterministic():
    assert np.array_equal(gen_gaussian_input(100, 5, 9), gen_gaussian_input(100, 5, 9))


def test_gaussian_input_moments():
    m, d = 4096, 50
    a = gen_gaussian_input(m, d, 1)
    assert abs(a.mean()) <= 4 / math.sqrt(m * d)
    assert abs(a.var() - 1) <= 0.05


def test_gaussian_input_rejects_wide():
    with pytest.raises(DimensionError):
        gen_gaussian_input(5, 5, 0)


def test_generators_distinct_across_seeds():
    seen = {gen_gaussian_input(20, 2, s).tobytes() for s in range(100)}
    assert len(seen) == 100
    seen = {gen_illcond_input(20, 2, IllCondSpectrum((2.0, 1.0)), s).tobytes() for s in range(100)}
    assert len(seen) == 100
    a = gen_gaussian_input(20, 2, 0)
    seen = {gen_rhs(a, seed=s).tobytes() for s in range(100)}
    assert len(seen) == 100


def test_orthonormal_square():
    q = random_orthonormal(4, 4, 0)
    assert np.abs(q.T @ q - np.eye(4)).max() <= 1e-12


def test_orthonormal_tall():
    q = random_orthonormal(64, 8, 1)
    assert np.abs(q.T @ q - np.eye(8)).max() <= 1e-12


def test_orthonormal_isometry():
    q = random_orthonormal(64, 8, 2)
    x = np.random.default_rng(3).standard_normal(8)
    assert abs(np.linalg.norm(q @ x) - np.linalg.norm(x)) <= 1e-12 * np.linalg.norm(x)


def test_orthonormal_rejects_wide():
    with pytest.raises(DimensionError):
        random_orthonormal(3, 4, 0)


def test_default_spectrum():
    sig = IllCondSpectrum.default(50).sigma
    assert sig[0] == 1e4 and sig[13] == pytest.approx(1e-9) and sig[14] == 1e-10
    assert all(v == 1e-10 for v in sig[14:])
    assert len(sig) == 50


def test_spectrum_validation():
    with pytest.raises(ValueError):
        IllCondSpectrum((1.0, 2.0))
    with pytest.raises(ValueError):
        IllCondSpectrum((1.0, 0.0))


def test_illcond_rank_one():
    a = gen_illcond_input(10, 1, IllCondSpectrum((3.0,)), 4)
    assert np.linalg.norm(a) == pytest.approx(3.0, rel=1e-14)


def test_illcond_default_spectral_norm():
    a = gen_illcond_input(4096, 50, seed=5)
    assert abs(np.linalg.norm(a, 2) - 1e4) <= 1e-8 * 1e4


def test_illcond_columns_of_v_recover_spectrum():
    m, d = 512, 30
    spec = IllCondSpectrum.default(d)
    a = gen_illcond_input(m, d, spec, 6)
    _, v = illcond_factors(m, d, 6)
    sig = np.asarray(spec.sigma)
    got = np.linalg.norm(a @ v, axis=0)
    assert np.all(np.abs(got - sig) <= 1e-8 * sig[0])
    big = sig >= 1e-5 * sig[0]
    assert np.all(np.abs(got[big] - sig[big]) <= 1e-8 * sig[big])


def test_illcond_spectrum_length_mismatch():
    with pytest.raises(DimensionError):
        gen_illcond_input(10, 3, IllCondSpectrum((1.0, 1.0)), 0)


def test_rhs_noise_component_exact():
    a = gen_gaussian_input(300, 10, 7)
    signal, noise = rhs_components(a, seed=8)
    assert np.linalg.norm(noise) == pytest.approx(0.001, rel=1e-14)
    assert np.linalg.norm(signal) == pytest.approx(1.0, rel=1e-14)
    assert np.array_equal(gen_rhs(a, seed=8), signal + noise)


def test_rhs_norm_bounds():
    a = gen_gaussian_input(300, 10, 9)
    assert 1 - 0.001 <= np.linalg.norm(gen_rhs(a, seed=1)) <= 1 + 0.001


@pytest.mark.parametrize("family", ["gaussian", "illcond"])
def test_rhs_exact_residual_is_out_of_range_noise(family):
    m, d = 400, 12
    a = gen_gaussian_input(m, d, 2) if family == "gaussian" else gen_illcond_input(m, d, seed=2)
    _, noise = rhs_components(a, seed=3)
    q, _ = np.linalg.qr(a)
    null_part = noise - q @ (q.T @ noise)
    exact = solve_exact(LlspProblem(a, gen_rhs(a, seed=3)))
    assert exact.residual <= 0.001 * (1 + 1e-9)
    assert exact.residual == pytest.approx(np.linalg.norm(null_part), rel=1e-6)


def test_rhs_custom_noise_scale():
    a = gen_gaussian_input(50, 3, 0)
    _, noise = rhs_components(a, RhsRecipe(0.5), seed=0)
    assert np.linalg.norm(noise) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        RhsRecipe(0.0)


def test_rhs_zero_matrix():
    with pytest.raises(ValueError):
        gen_rhs(np.zeros((5, 2)), seed=0)
