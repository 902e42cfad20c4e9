"""CSV ingestion and preparation of the Red Wine Quality and California Housing problems."""
from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._random import make_rng, sample_without_replacement
from .errors import DataError
from .solver import LlspProblem

log = logging.getLogger(__name__)

MISSING = {"", "na", "nan", "null", "none", "?"}

REDWINE_FEATURES = (
    "fixed acidity", "volatile acidity", "citric acid", "residual sugar",
    "chlorides", "free sulfur dioxide", "total sulfur dioxide", "density",
    "ph", "sulphates", "alcohol",
)
REDWINE_TARGETS = ("quality", "class")
REDWINE_ROWS = 1599
REDWINE_PAD_TO = 2048

CALIHOUSING_TARGETS = ("median house value", "medianhousevalue", "medhouseval")
CALIHOUSING_CATEGORICAL = ("ocean proximity",)
CALIHOUSING_FEATURES = 8
CALIHOUSING_SAMPLE = 16384


def normalize_name(name: str) -> str:
    """Header key: lowercase, quotes stripped, ``_``/``-`` read as spaces."""
    return " ".join(name.strip().strip('"').strip("'").lower().replace("_", " ").replace("-", " ").split())


@dataclass(frozen=True)
class CsvTable:
    header: tuple
    rows: np.ndarray
    delimiter: str = ","

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    def index(self, name: str) -> int:
        keys = [normalize_name(h) for h in self.header]
        try:
            return keys.index(normalize_name(name))
        except ValueError:
            raise DataError(f"column {name!r} not found in {list(self.header)}") from None

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.index(name)]

    def has(self, name: str) -> bool:
        return normalize_name(name) in {normalize_name(h) for h in self.header}


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    target_column: str
    feature_columns: tuple
    pad_to: int | None = None
    sample_to: int | None = None
    add_bias: bool = True

    def __post_init__(self):
        feats = {normalize_name(f) for f in self.feature_columns}
        if normalize_name(self.target_column) in feats:
            raise ValueError("target column listed among features")


def sniff_delimiter(line: str) -> str:
    return ";" if line.count(";") > line.count(",") else ","


def load_csv(path, delimiter: str | None = None, *, allow_missing: bool = False,
             skip_columns=(), header: bool = True) -> CsvTable:
    """Read a numeric CSV, by default with a header line.

    ``delimiter=None`` picks ``;`` or ``,`` from the first line. Without a
    header, columns are named ``c0, c1, ...``. Columns named in
    ``skip_columns`` are dropped unparsed. Empty/NA cells become NaN only
    with ``allow_missing``; any other non-numeric cell raises
    :class:`DataError` naming its 1-based data row and column.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from err
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataError(f"{path}: empty file" if not header else f"{path}: missing header line")
    delimiter = delimiter or sniff_delimiter(lines[0])
    reader = csv.reader(lines, delimiter=delimiter)
    if header:
        names = [h.strip() for h in next(reader)]
    else:
        names = [f"c{i}" for i in range(len(next(csv.reader(lines[:1], delimiter=delimiter))))]
    skip = {normalize_name(c) for c in skip_columns}
    keep = [i for i, h in enumerate(names) if normalize_name(h) not in skip]
    rows = []
    for rownum, rec in enumerate(reader, start=1):
        if not rec or all(not c.strip() for c in rec):
            continue
        if len(rec) != len(names):
            raise DataError(f"{path}: row {rownum} has {len(rec)} fields, expected {len(names)}")
        vals = []
        for i in keep:
            cell = rec[i].strip()
            if cell.lower() in MISSING and allow_missing:
                vals.append(math.nan)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}: row {rownum}, column {names[i]!r}: "
                                f"cannot parse {cell!r} as a number") from None
            if not math.isfinite(v):
                raise DataError(f"{path}: row {rownum}, column {names[i]!r}: non-finite value")
            vals.append(v)
        rows.append(vals)
    arr = np.array(rows, dtype=np.float64).reshape(len(rows), len(keep))
    log.info("loaded %s: %d rows x %d columns", path, arr.shape[0], arr.shape[1])
    return CsvTable(tuple(names[i] for i in keep), arr, delimiter)


def _pick(t: CsvTable, candidates) -> str:
    for c in candidates:
        if t.has(c):
            return c
    raise DataError(f"none of the target columns {list(candidates)} found in {list(t.header)}")


def redwine_spec(t: CsvTable | None = None) -> DatasetSpec:
    target = _pick(t, REDWINE_TARGETS) if t is not None else REDWINE_TARGETS[0]
    return DatasetSpec("redwine", target, REDWINE_FEATURES, pad_to=REDWINE_PAD_TO)


def calihousing_spec(t: CsvTable, sample_to: int | None = CALIHOUSING_SAMPLE) -> DatasetSpec:
    target = _pick(t, CALIHOUSING_TARGETS)
    skip = {normalize_name(target)} | set(CALIHOUSING_CATEGORICAL)
    feats = tuple(h for h in t.header if normalize_name(h) not in skip)
    if len(feats) != CALIHOUSING_FEATURES:
        raise DataError(f"expected {CALIHOUSING_FEATURES} feature columns, found {len(feats)}: {feats}")
    return DatasetSpec("calihousing", target, feats, sample_to=sample_to)


def prepare_redwine(t: CsvTable, seed: int) -> LlspProblem:
    """Bias column + 11 features, zero rows padded to 2048, rows jointly permuted."""
    spec = redwine_spec(t)
    extra = {normalize_name(h) for h in t.header} - {normalize_name(c) for c in spec.feature_columns} \
        - {normalize_name(spec.target_column)}
    if extra:
        raise DataError(f"unexpected columns in red wine table: {sorted(extra)}")
    feats = np.column_stack([t.column(c) for c in spec.feature_columns])
    if np.isnan(feats).any():
        raise DataError("red wine table has missing cells")
    n = t.n_rows
    pad_to = spec.pad_to
    if n != REDWINE_ROWS:
        pad_to = 1 << max(n - 1, 1).bit_length()
        warnings.warn(f"red wine table has {n} rows (expected {REDWINE_ROWS}); padding to {pad_to}",
                      stacklevel=2)
    a = np.zeros((pad_to, 1 + feats.shape[1]))
    b = np.zeros(pad_to)
    a[:n, 0] = 1.0
    a[:n, 1:] = feats
    b[:n] = t.column(spec.target_column)
    perm = make_rng(seed, "redwine-rows").permutation(pad_to)
    return LlspProblem(a[perm], b[perm])


def prepare_calihousing(t: CsvTable, seed: int, sample_to: int | None = CALIHOUSING_SAMPLE) -> LlspProblem:
    """Drop incomplete records, sample ``sample_to`` rows, append a bias column.

    ``sample_to=None`` keeps every complete record (fixture-sized tables).
    """
    spec = calihousing_spec(t, sample_to)
    cols = [t.index(c) for c in spec.feature_columns] + [t.index(spec.target_column)]
    data = t.rows[:, cols]
    complete = ~np.isnan(data).any(axis=1)
    dropped = int((~complete).sum())
    if dropped:
        log.info("calihousing: dropped %d incomplete records", dropped)
    data = data[complete]
    n = data.shape[0] if spec.sample_to is None else spec.sample_to
    if data.shape[0] < n:
        raise DataError(f"calihousing has {data.shape[0]} complete records, need {n}")
    idx = sample_without_replacement(make_rng(seed, "calihousing-rows"), data.shape[0], n)
    a = np.column_stack([data[idx, :-1], np.ones(n)])
    return LlspProblem(a, data[idx, -1])


def load_dataset(name: str, path, seed: int, sample_to: int | None = CALIHOUSING_SAMPLE) -> LlspProblem:
    if name == "redwine":
        return prepare_redwine(load_csv(path), seed)
    if name == "calihousing":
        t = load_csv(path, allow_missing=True, skip_columns=CALIHOUSING_CATEGORICAL)
        return prepare_calihousing(t, seed, sample_to)
    raise ValueError(f"unknown dataset {name!r}")
