"""Deterministic seed derivation for parallel simulation streams.

Every stochastic component receives a private ``numpy.random.Generator``
whose seed is derived from a master seed plus the coordinates of the work
unit (replication index, block index, tile position).  The derivation is a
fixed 64-bit mixing chain, so results never depend on scheduling order or
worker count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    # Standard splitmix64 finalizer; good avalanche for sequential inputs.
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, *parts: int) -> int:
    """Mix a master seed with integer coordinates into a 64-bit stream seed."""
    state = _splitmix64(master_seed & _MASK64)
    for part in parts:
        state = _splitmix64(state ^ (part & _MASK64))
    return state


def make_rng(master_seed: int, *parts: int) -> np.random.Generator:
    """Generator seeded from ``derive_seed(master_seed, *parts)``."""
    return np.random.default_rng(derive_seed(master_seed, *parts))
