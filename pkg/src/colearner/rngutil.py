"""Deterministic seed derivation helpers.

Every stochastic stage in the package gets its own integer seed derived from
a parent seed plus fixed stage tags. Derivation goes through SeedSequence so
child streams are statistically independent and stable across platforms,
worker counts and scheduling order.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(*parts: int) -> int:
    """Collapse integer parts into a single 64-bit child seed."""
    entropy = [int(p) & _MASK64 for p in parts]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def rng_from(*parts: int) -> np.random.Generator:
    """Generator seeded from the given parts (see derive_seed)."""
    entropy = [int(p) & _MASK64 for p in parts]
    return np.random.default_rng(np.random.SeedSequence(entropy))
