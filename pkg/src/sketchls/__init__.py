"""Sketch-and-solve for highly overdetermined least squares.

Compress ``M = (A | b)`` with a sparse scaled-unitary multiplier F and solve
the small problem ``min_u ||F A u - F b||`` instead of the full one.
"""
from .errors import DataError, DimensionError, RankDeficientError, SketchLSError
from .datasets import load_csv, load_dataset, prepare_calihousing, prepare_redwine
from .generators import IllCondSpectrum, RhsRecipe, gen_gaussian_input, gen_illcond_input, gen_rhs
from .harness import ExperimentConfig, ExperimentReport, emit_report, run_experiment
from .linalg import QrFactors, euclidean_norm, householder_qr, solve_least_squares
from .sketch import CostMeter, SketchKind, SketchOperator, apply, as_dense, make_sketch
from .solver import (
    EmbeddingReport,
    LlspProblem,
    Solution,
    check_embedding,
    relative_residual,
    sketch_and_solve,
    solve_exact,
)

__version__ = "0.1.0"

__all__ = [
    "CostMeter", "DataError", "DimensionError", "EmbeddingReport", "ExperimentConfig",
    "ExperimentReport", "IllCondSpectrum", "LlspProblem", "QrFactors", "RankDeficientError",
    "RhsRecipe", "SketchKind", "SketchLSError", "SketchOperator", "Solution", "apply",
    "as_dense", "check_embedding", "emit_report", "euclidean_norm", "gen_gaussian_input",
    "gen_illcond_input", "gen_rhs", "householder_qr", "load_csv", "load_dataset",
    "make_sketch", "prepare_calihousing", "prepare_redwine", "relative_residual",
    "run_experiment", "sketch_and_solve", "solve_exact", "solve_least_squares",
]
