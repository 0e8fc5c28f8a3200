"""Reproducible random streams for parallel Monte Carlo.

A stream is identified by a master seed and a tuple of non-negative
integer keys (typically ``(trial,)`` or ``(purpose, n, trial)``).  The
derivation is

    Generator(Philox(SeedSequence(master_seed, spawn_key=keys)))

i.e. numpy's SeedSequence hashes ``(master_seed, keys)`` into a 128-bit
Philox key, and Philox is a counter-based generator, so every stream is
independent of every other one and of the order in which streams are
created.  This derivation is part of the public contract: changing it
changes every published number.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "MASK64"]

MASK64 = (1 << 64) - 1


def stream(master_seed: int, *keys: int) -> np.random.Generator:
    """Return the generator for ``(master_seed, *keys)``.

    Parameters
    ----------
    master_seed : int
        Non-negative seed, reduced modulo 2**64.
    *keys : int
        Non-negative integers naming the sub-stream.
    """
    if master_seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seed and stream keys must be non-negative")
    ss = np.random.SeedSequence(int(master_seed) & MASK64, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
