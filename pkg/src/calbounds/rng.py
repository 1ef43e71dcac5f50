"""Deterministic random-stream derivation.

Every random draw in the library flows from a single 64-bit run seed.
Substreams are derived through ``SeedSequence`` spawn keys feeding the
counter-based Philox bit generator, so a given (seed, path) pair yields the
same stream on every platform, and independent cells of an experiment grid
can draw concurrently without sharing generator state.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for substream ``path`` under ``seed``.

    ``path`` components must be non-negative integers (grid indices,
    repetition counters, ...). The empty path is the root stream.
    """
    key = tuple(int(p) for p in path)
    if any(p < 0 for p in key):
        raise ValueError("substream path components must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *path: int) -> int:
    """Derive a plain integer seed for substream ``path`` (for nested configs)."""
    key = tuple(int(p) for p in path)
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])
