"""Deterministic random streams for reproducible parallel Monte Carlo.

Every unit of work (a simulated dataset, one permutation, one power
replicate) draws from its own Philox counter-based stream addressed by a
``(seed, *path)`` tuple. Streams are independent of worker count and
scheduling order, so results are bit-identical whether a job runs on one
process or eight.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _normalize(seed: int) -> int:
    return int(seed) & _MASK64


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the Generator for the stream addressed by ``(seed, *path)``.

    Path components must be non-negative integers below 2**32.
    """
    ss = np.random.SeedSequence(_normalize(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """Derive a child 64-bit seed usable as the root of a new stream family."""
    ss = np.random.SeedSequence(_normalize(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])
