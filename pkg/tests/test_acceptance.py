"""Acceptance criteria C1-C8, each printed as one PASS/FAIL line.

C3 and C4 are long runs (minutes); deselect them with ``-m "not slow"``.
C4 needs the genuine datasets (see README) and skips without them.
"""
import contextlib
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import CALIHOUSING_CSV, FIXTURES, REDWINE_CSV
from sketchls.generators import gen_gaussian_input, gen_rhs
from sketchls.harness import ExperimentConfig, run_experiment
from sketchls.sketch import CostMeter, PermSketch, SketchKind, apply, make_sketch
from sketchls.solver import LlspProblem, check_embedding, sketch_and_solve, solve_exact

ORACLE = Path(__file__).parent / "data" / "full_scale_oracle.json"
MASTER_SEED = 42
H_VALUES = (2, 3, 4, 5, 6)
KINDS = [k.value for k in SketchKind]
SPARSE = ["perm", "block-perm", "asph"]


def grid(input, m=None, d=None, trials=100, **kw):
    cfg = ExperimentConfig(input=input, m=m, d=d, trials=trials, master_seed=MASTER_SEED, **kw)
    return run_experiment(cfg)


def test_c1_optimality_floor(acceptance):
    with acceptance("C1", "optimality floor, 1024x16 grid, both families") as note:
        t0 = time.perf_counter()
        worst = math.inf
        for family in ("gaussian", "illcond"):
            rep = grid(family, 1024, 16, trials=20, threads=1)
            assert len(rep.cells) == 20
            worst = min(worst, min(c.min for c in rep.cells))
        elapsed = time.perf_counter() - t0
        note(f"min relative residual {worst:.12f}, {elapsed:.1f}s single-threaded")
        assert worst >= 1 - 1e-9
        assert elapsed < 60


def test_c2_identity_sketch(acceptance):
    with acceptance("C2", "identity sketch reproduces exact solve, 100 problems 256x8") as note:
        worst = 0.0
        for seed in range(100):
            a = gen_gaussian_input(256, 8, seed)
            p = LlspProblem(a, gen_rhs(a, seed=seed))
            exact = solve_exact(p)
            x = sketch_and_solve(p, PermSketch(m=256, rows=np.arange(256))).x
            worst = max(worst, np.linalg.norm(x - exact.x) / np.linalg.norm(exact.x))
        note(f"max relative error {worst:.2e}")
        assert worst <= 1e-10


@pytest.mark.slow
def test_c3_full_scale(acceptance):
    with acceptance("C3", "4096x50 reproduction, both families, 100 trials") as note:
        oracle = json.loads(ORACLE.read_text())["cells"]
        t0 = time.perf_counter()
        means = {}
        for family in ("gaussian", "illcond"):
            rep = grid(family, 4096, 50)
            for c in rep.cells:
                means[family, c.kind, c.h] = c.mean_rel_resid
        elapsed = time.perf_counter() - t0
        problems = []
        for key, mu in means.items():
            if not (math.isfinite(mu) and mu >= 1):
                problems.append(f"(a) {key} mean {mu}")
        for family in ("gaussian", "illcond"):
            for k in KINDS:
                if means[family, k, 6] > means[family, k, 2] + 0.02:
                    problems.append(f"(b) {family}/{k} h6 {means[family, k, 6]:.4f} > h2 {means[family, k, 2]:.4f}")
        gap = max(abs(means["gaussian", k, h] - means["illcond", k, h]) for k in KINDS for h in H_VALUES)
        if gap > 0.1:
            problems.append(f"(c) conditioning gap {gap:.4f}")
        drift = {key: abs(mu - oracle["/".join(map(str, key))]["mean"]) for key, mu in means.items()}
        worst_key = max(drift, key=drift.get)
        for key, dv in drift.items():
            if dv > 0.02:
                problems.append(f"oracle {'/'.join(map(str, key))} off by {dv:.4f}")
        note(f"conditioning gap {gap:.4f}, max oracle drift {drift[worst_key]:.4f} at "
             f"{'/'.join(map(str, worst_key))}, {elapsed:.0f}s")
        assert not problems, "; ".join(problems)
        assert elapsed < 15 * 60


def _real_data_gaps(name, path, note):
    rep = grid(name, data_path=str(path))
    problems = []
    for h in H_VALUES:
        g = rep.cell("gaussian", h).mean_rel_resid
        for k in SPARSE:
            mu = rep.cell(k, h).mean_rel_resid
            if not (math.isfinite(mu) and mu >= 1):
                problems.append(f"{name} {k} h={h} mean {mu}")
            if abs(mu - g) > 0.05:
                problems.append(f"{name} {k} h={h} gap {abs(mu - g):.3f}")
    note(name + " h=2 means " + ", ".join(f"{k} {rep.cell(k, 2).mean_rel_resid:.3f}" for k in KINDS))
    return problems


@pytest.mark.slow
def test_c4_real_data(acceptance):
    if REDWINE_CSV is None or CALIHOUSING_CSV is None:
        with acceptance("C4", "real-data reproduction (fixture smoke path)") as note:
            with pytest.warns(UserWarning):
                rep = grid("redwine", data_path=str(FIXTURES / "redwine_small.csv"), trials=5)
            assert all(math.isfinite(c.mean_rel_resid) for c in rep.cells)
            note("genuine datasets absent; smoke run only")
        pytest.skip("genuine red wine / California housing CSVs not available")
    with acceptance("C4", "real-data reproduction, redwine 2048x12 and calihousing 16384x9") as note:
        problems = _real_data_gaps("redwine", REDWINE_CSV, note) + \
            _real_data_gaps("calihousing", CALIHOUSING_CSV, note)
        assert not problems, f"{len(problems)} violations, first: {problems[0]}" if problems else ""


def test_c5_embedding(acceptance):
    with acceptance("C5", "embedding verifier, dual setting and square unitary") as note:
        mat = np.random.default_rng(MASTER_SEED).standard_normal((1024, 9))
        rep = check_embedding(make_sketch("perm", 256, 1024, MASTER_SEED), mat, 0.5, 1000, MASTER_SEED)
        sq = check_embedding(PermSketch(m=1024, rows=np.random.default_rng(1).permutation(1024)),
                             mat, 0.5, 1000, MASTER_SEED)
        err = max(abs(sq.ratio_min - 1), abs(sq.ratio_max - 1))
        note(f"violation fraction {rep.violation_fraction}, ratios in "
             f"[{rep.ratio_min:.3f}, {rep.ratio_max:.3f}]; square unitary error {err:.1e}")
        assert rep.violation_fraction == 0.0
        assert err <= 1e-12


def test_c6_scaled_unitarity(acceptance):
    with acceptance("C6", "scaled unitarity, 100 seeds, non-Gaussian kinds") as note:
        worst = 0.0
        for kind in SPARSE:
            for s, m in ((8, 64), (16, 128), (50, 512)):
                for seed in range(100):
                    op = make_sketch(kind, s, m, seed)
                    f = op.as_dense()
                    worst = max(worst, np.abs(f @ f.T / op.scale**2 - np.eye(s)).max())
        note(f"max deviation {worst:.1e}")
        assert worst <= 1e-12


def test_c7_cost_contracts(acceptance):
    with acceptance("C7", "cost contracts on 50 random shapes") as note:
        rng = np.random.default_rng(MASTER_SEED)
        worst_ratio = 0.0
        for i in range(50):
            d = int(rng.integers(1, 20))
            s = int(rng.integers(d + 1, 7 * d + 2))
            m = int(rng.integers(s, 50 * s))
            cols = d + 1
            mat = rng.standard_normal((m, cols))
            for kind in SketchKind:
                meter = CostMeter()
                apply(make_sketch(kind, s, m, i), mat, meter)
                if kind is SketchKind.GAUSSIAN:
                    assert meter.multiplies > s * m * cols, (i, s, m, d)
                    continue
                if kind is SketchKind.PERM:
                    assert meter.entries_read == s * cols, (i, s, m, d)
                worst_ratio = max(worst_ratio, meter.scalar_ops / (9 * (s + m) * cols))
        note(f"max sparse ops / 9(s+m)(d+1) = {worst_ratio:.3f}")
        assert worst_ratio < 1


def test_c8_determinism(acceptance):
    with acceptance("C8", "bit-identical reruns with the same master seed") as note:
        for family, kw in (("gaussian", dict(m=512, d=10)), ("illcond", dict(m=512, d=10)),
                           ("redwine", dict(data_path=str(FIXTURES / "redwine_small.csv")))):
            with pytest.warns(UserWarning) if family == "redwine" else contextlib.nullcontext():
                r1 = grid(family, trials=10, threads=1, **kw)
                r2 = grid(family, trials=10, threads=4, **kw)
            assert r1.numeric_body() == r2.numeric_body(), family
        note("gaussian, illcond, redwine fixture; 1 vs 4 threads")

