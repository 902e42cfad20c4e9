"""Seeded relative-residual experiments over (multiplier kind, oversampling h) grids."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import datasets
from ._random import key
from .errors import RankDeficientError, SketchLSError
from .generators import RhsRecipe, gen_gaussian_input, gen_illcond_input, gen_rhs
from .sketch import CostMeter, SketchKind, make_sketch
from .solver import LlspProblem, UnderdeterminedSketchWarning, sketch_and_solve, solve_exact

log = logging.getLogger(__name__)

INPUTS = ("gaussian", "illcond", "redwine", "calihousing")
DEFAULT_H = (2, 3, 4, 5, 6)
DEFAULT_TRIALS = 100
CSV_COLUMNS = (
    "input", "kind", "h", "s", "trials", "mean_rel_resid", "std_rel_resid", "min", "max",
    "mean_entries_read", "mean_scalar_ops", "wall_ms",
)
_MASK64 = (1 << 64) - 1


@dataclass
class ExperimentConfig:
    input: str = "gaussian"
    m: int | None = 4096
    d: int | None = 50
    kinds: tuple = tuple(SketchKind)
    h_values: tuple = DEFAULT_H
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    noise_scale: float = 0.001
    data_path: str | None = None
    refresh_input: bool = False
    sample_to: int | None = datasets.CALIHOUSING_SAMPLE
    keep_trials: bool = False
    threads: int | None = None

    def __post_init__(self):
        if self.input not in INPUTS:
            raise ValueError(f"unknown input {self.input!r} (choose from {', '.join(INPUTS)})")
        self.kinds = tuple(SketchKind.parse(k) for k in self.kinds)
        self.h_values = tuple(int(h) for h in self.h_values)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(h < 1 for h in self.h_values):
            raise ValueError("h values must be positive")
        if self.input in ("gaussian", "illcond"):
            if self.m is None or self.d is None or not 1 <= self.d < self.m:
                raise ValueError(f"synthetic inputs need 1 <= d < m, got m={self.m}, d={self.d}")
        elif self.data_path is None:
            raise ValueError(f"input {self.input!r} needs a data path")

    def echo(self) -> dict:
        out = asdict(self)
        out["kinds"] = [k.value for k in self.kinds]
        out["h_values"] = list(self.h_values)
        out.pop("threads")
        return out


@dataclass
class TrialRecord:
    trial: int
    seed: int
    rel_resid: float
    entries_read: int
    scalar_ops: int
    error: str | None = None


@dataclass
class CellResult:
    input: str
    kind: str
    h: int
    s: int
    trials: int
    mean_rel_resid: float | None = None
    std_rel_resid: float | None = None
    min: float | None = None
    max: float | None = None
    mean_entries_read: float | None = None
    mean_scalar_ops: float | None = None
    wall_ms: float | None = None
    skipped: str | None = None
    failures: int = 0
    records: list = field(default_factory=list)

    def row(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


@dataclass
class ExperimentReport:
    config: dict
    problem: dict
    cells: list = field(default_factory=list)

    def cell(self, kind, h) -> CellResult:
        kind = SketchKind.parse(kind).value
        for c in self.cells:
            if c.kind == kind and c.h == h:
                return c
        raise KeyError((kind, h))

    def numeric_body(self) -> list:
        """Cell contents without wall-clock fields (the deterministic part)."""
        body = []
        for c in self.cells:
            d = asdict(c)
            d.pop("wall_ms")
            body.append(d)
        return body

    def to_dict(self) -> dict:
        return {"config": self.config, "problem": self.problem,
                "cells": [asdict(c) for c in self.cells]}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        cells = []
        for c in d["cells"]:
            c = dict(c)
            c["records"] = [TrialRecord(**r) for r in c.get("records", [])]
            cells.append(CellResult(**c))
        return cls(config=d["config"], problem=d["problem"], cells=cells)


def trial_seed(master_seed: int, trial: int, kind, h: int) -> int:
    """64-bit multiplier seed from (master seed, kind tag, h, trial index)."""
    ss = np.random.SeedSequence([master_seed & _MASK64, key(SketchKind.parse(kind).value), h, trial])
    return int(ss.generate_state(1, np.uint64)[0])


def thread_count(requested: int | None = None) -> int:
    n = requested
    if n is None:
        try:
            n = int(os.environ.get("SKETCHLS_THREADS", "0"))
        except ValueError:
            n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def build_problem(cfg: ExperimentConfig, instance: int = 0) -> LlspProblem:
    """Problem instance ``instance`` for ``cfg`` (0 unless inputs are refreshed)."""
    seed = int(np.random.SeedSequence([cfg.master_seed & _MASK64, key(cfg.input), instance])
               .generate_state(1, np.uint64)[0])
    if cfg.input == "gaussian":
        a = gen_gaussian_input(cfg.m, cfg.d, seed)
    elif cfg.input == "illcond":
        a = gen_illcond_input(cfg.m, cfg.d, seed=seed)
    else:
        return datasets.load_dataset(cfg.input, cfg.data_path, seed, cfg.sample_to)
    return LlspProblem(a, gen_rhs(a, RhsRecipe(cfg.noise_scale), seed))


def _fsum_mean(vals):
    return math.fsum(vals) / len(vals)


def _run_trial(problem, exact, kind, s, seed, trial) -> TrialRecord:
    meter = CostMeter()
    op = make_sketch(kind, s, problem.m, seed)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnderdeterminedSketchWarning)
            sol = sketch_and_solve(problem, op, exact, meter)
    except RankDeficientError as err:
        return TrialRecord(trial, seed, math.inf, meter.entries_read, meter.scalar_ops, str(err))
    return TrialRecord(trial, seed, float(sol.relative_residual), meter.entries_read, meter.scalar_ops)


def _aggregate(cell: CellResult, recs: list, keep: bool) -> None:
    vals = [r.rel_resid for r in recs]
    cell.failures = sum(r.error is not None for r in recs)
    mean = _fsum_mean(vals)
    cell.mean_rel_resid = mean
    if len(vals) > 1 and math.isfinite(mean):
        cell.std_rel_resid = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1))
    elif math.isfinite(mean):
        cell.std_rel_resid = 0.0
    else:
        cell.std_rel_resid = math.nan
    cell.min = min(vals)
    cell.max = max(vals)
    if math.isfinite(mean):
        cell.mean_rel_resid = min(max(mean, cell.min), cell.max)
    cell.mean_entries_read = _fsum_mean([float(r.entries_read) for r in recs])
    cell.mean_scalar_ops = _fsum_mean([float(r.scalar_ops) for r in recs])
    if keep:
        cell.records = list(recs)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run every (kind, h) cell of ``cfg`` for ``cfg.trials`` seeded multipliers.

    One problem instance serves all trials unless ``cfg.refresh_input`` is
    set, in which case trial ``t`` uses instance ``t`` (with its own exact
    solve). Trials may run on a thread pool; aggregation is in trial order.
    """
    n_instances = cfg.trials if cfg.refresh_input and cfg.input in ("gaussian", "illcond") else 1
    problems = [build_problem(cfg, i) for i in range(n_instances)]
    exacts = [solve_exact(p) for p in problems]
    p0 = problems[0]
    report = ExperimentReport(
        config=cfg.echo(),
        problem={"m": p0.m, "d": p0.d, "instances": n_instances,
                 "exact_residual": exacts[0].residual},
    )
    workers = thread_count(cfg.threads)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for kind in cfg.kinds:
            for h in cfg.h_values:
                s = p0.d * h
                cell = CellResult(cfg.input, kind.value, h, s, cfg.trials)
                report.cells.append(cell)
                if s > p0.m:
                    cell.trials = 0
                    cell.skipped = f"s={s} exceeds m={p0.m}"
                    log.info("skipping %s h=%d: %s", kind.value, h, cell.skipped)
                    continue
                args = []
                for t in range(cfg.trials):
                    i = t if n_instances > 1 else 0
                    args.append((problems[i], exacts[i], kind, s, trial_seed(cfg.master_seed, t, kind, h), t))
                t0 = time.perf_counter()
                if pool is None:
                    recs = [_run_trial(*a) for a in args]
                else:
                    recs = list(pool.map(lambda a: _run_trial(*a), args))
                cell.wall_ms = (time.perf_counter() - t0) * 1e3
                _aggregate(cell, recs, cfg.keep_trials)
                log.debug("%s h=%d mean=%.6f", kind.value, h, cell.mean_rel_resid)
    finally:
        if pool is not None:
            pool.shutdown()
    return report


def emit_report(report: ExperimentReport, fmt: str, path) -> Path:
    """Write ``report`` as CSV (one line per cell) or JSON (full, with config echo)."""
    path = Path(path)
    try:
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
                w.writeheader()
                for c in report.cells:
                    w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                                for k, v in c.row().items()})
        elif fmt == "json":
            with path.open("w") as fh:
                json.dump(report.to_dict(), fh, indent=2)
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except OSError as err:
        raise SketchLSError(f"cannot write report to {path}: {err}") from err
    return path


def load_report(path) -> ExperimentReport:
    with Path(path).open() as fh:
        return ExperimentReport.from_dict(json.load(fh))
