"""Seed derivation and sampling helpers."""
from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def key(tag: str) -> int:
    """Stable integer for a string tag (used as a seed-derivation key)."""
    return zlib.crc32(tag.encode("utf-8"))


def make_rng(seed: int, *keys: int | str) -> np.random.Generator:
    """Generator keyed by ``seed`` plus any number of derivation keys.

    Streams for distinct key tuples are statistically independent
    (``SeedSequence`` entropy mixing); equal tuples give identical streams.
    """
    words = [int(seed) & _MASK64]
    words.extend(key(k) if isinstance(k, str) else int(k) & _MASK64 for k in keys)
    return np.random.default_rng(np.random.SeedSequence(words))


def sample_without_replacement(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """First ``k`` slots of a partial Fisher-Yates shuffle of ``range(n)``."""
    if not 0 <= k <= n:
        raise ValueError(f"cannot sample {k} of {n} items")
    pool = np.arange(n)
    picks = rng.integers(np.arange(k), n) if k else np.empty(0, dtype=np.int64)
    for i, j in enumerate(picks):
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k].copy()
