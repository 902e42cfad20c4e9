"""Command-line entry point: ``sketchls {solve,experiment,verify-embedding}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import harness
from ._random import make_rng
from .datasets import load_csv, sniff_delimiter
from .errors import DataError, DimensionError, RankDeficientError, SketchLSError
from .sketch import SketchKind, make_sketch
from .solver import LlspProblem, check_embedding, sketch_and_solve, solve_exact

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
KIND_NAMES = [k.value for k in SketchKind]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _kind_list(text):
    try:
        return [SketchKind.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sketchls", description="Sketch-and-solve least squares with sparse unitary multipliers.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one least-squares problem from CSV")
    s.add_argument("--matrix", required=True, help="CSV of A (header line optional)")
    s.add_argument("--rhs", required=True, help="CSV of b, or 'last-column' to take b from --matrix")
    s.add_argument("--multiplier", required=True, choices=KIND_NAMES)
    s.add_argument("--h", type=int, required=True, help="oversampling ratio, s = d*h")
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--exact", action="store_true", help="also solve exactly and report the relative residual")

    e = sub.add_parser("experiment", help="run the relative-residual experiment grid")
    e.add_argument("--input", required=True, choices=harness.INPUTS)
    e.add_argument("--m", type=int, default=4096)
    e.add_argument("--d", type=int, default=50)
    e.add_argument("--data", help="dataset CSV (redwine / calihousing)")
    e.add_argument("--multipliers", type=_kind_list, default=list(SketchKind))
    e.add_argument("--h", type=_int_list, default=list(harness.DEFAULT_H))
    e.add_argument("--trials", type=int, default=harness.DEFAULT_TRIALS)
    e.add_argument("--seed", type=_u64, default=0)
    e.add_argument("--out", required=True)
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--refresh-input", action="store_true", help="fresh synthetic (A, b) per trial")
    e.add_argument("--sample-to", type=int, default=harness.datasets.CALIHOUSING_SAMPLE,
                   help="calihousing rows to sample (0 keeps all)")
    e.add_argument("--keep-trials", action="store_true", help="retain per-trial records in JSON")

    v = sub.add_parser("verify-embedding", help="measure ||FMy||/||My|| on a Gaussian M")
    v.add_argument("--multiplier", required=True, choices=KIND_NAMES)
    v.add_argument("--s", type=int, required=True)
    v.add_argument("--m", type=int, required=True)
    v.add_argument("--cols", type=int, required=True)
    v.add_argument("--epsilon", type=float, required=True)
    v.add_argument("--probes", type=int, required=True)
    v.add_argument("--seed", type=_u64, default=0)
    return p


def _read_numeric_csv(path) -> np.ndarray:
    """Numeric CSV with an optional header line (detected by parse failure)."""
    try:
        with open(path, encoding="utf-8") as fh:
            first = fh.readline()
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from err
    delim = sniff_delimiter(first)
    try:
        [float(c) for c in first.strip().split(delim)]
        has_header = False
    except ValueError:
        has_header = True
    return load_csv(path, delim, header=has_header).rows


def cmd_solve(args) -> int:
    mat = _read_numeric_csv(args.matrix)
    if args.rhs == "last-column":
        a, b = mat[:, :-1], mat[:, -1]
    else:
        b = _read_numeric_csv(args.rhs)
        if b.ndim == 2 and b.shape[1] != 1:
            raise DataError(f"rhs must have one column, got {b.shape[1]}")
        a, b = mat, b.reshape(-1)
    try:
        problem = LlspProblem(a, b)
    except (DimensionError, ValueError) as err:
        raise DataError(str(err)) from err
    s = problem.d * args.h
    if not 1 <= s <= problem.m:
        raise UsageError(f"s = d*h = {s} must lie in [1, m={problem.m}]")
    exact = solve_exact(problem) if args.exact else None
    sol = sketch_and_solve(problem, make_sketch(args.multiplier, s, problem.m, args.seed), exact)
    out = {"x": sol.x.tolist(), "residual": sol.residual, "multiplier": args.multiplier,
           "s": s, "h": args.h, "seed": args.seed, "cost": sol.sketch_meta["cost"]}
    if exact is not None:
        out["exact_residual"] = exact.residual
        out["relative_residual"] = sol.relative_residual
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_experiment(args) -> int:
    try:
        cfg = harness.ExperimentConfig(
            input=args.input, m=args.m, d=args.d, kinds=tuple(args.multipliers),
            h_values=tuple(args.h), trials=args.trials, master_seed=args.seed,
            data_path=args.data, refresh_input=args.refresh_input,
            sample_to=args.sample_to or None, keep_trials=args.keep_trials,
        )
    except ValueError as err:
        raise UsageError(str(err)) from err
    report = harness.run_experiment(cfg)
    harness.emit_report(report, args.format, args.out)
    for c in report.cells:
        if c.skipped:
            print(f"{c.kind:>10} h={c.h}: skipped ({c.skipped})", file=sys.stderr)
        else:
            print(f"{c.kind:>10} h={c.h} s={c.s}: mean relative residual {c.mean_rel_resid:.6f}"
                  f" ({c.failures} degenerate)", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 1 <= args.s <= args.m or args.cols < 1:
        raise UsageError("need 1 <= s <= m and cols >= 1")
    if not 0 < args.epsilon < 1 or args.probes < 1:
        raise UsageError("need 0 < epsilon < 1 and probes >= 1")
    mat = make_rng(args.seed, "embedding-input").standard_normal((args.m, args.cols))
    op = make_sketch(args.multiplier, args.s, args.m, args.seed)
    rep = check_embedding(op, mat, args.epsilon, args.probes, args.seed)
    out = rep.as_dict()
    out.update(multiplier=args.multiplier, s=args.s, m=args.m, cols=args.cols, seed=args.seed)
    print(json.dumps(out, indent=2))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "experiment": cmd_experiment, "verify-embedding": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as err:
        print(f"sketchls: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except RankDeficientError as err:
        print(f"sketchls: numerical degeneracy: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, DimensionError) as err:
        print(f"sketchls: data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except SketchLSError as err:
        print(f"sketchls: error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
