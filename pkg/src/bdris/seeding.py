"""Deterministic seed derivation shared by all stochastic modules.

Every random draw in the package is rooted in an explicit integer seed.
Substreams are split with ``numpy.random.SeedSequence``, whose spawning
hash is platform-stable, so results are bit-reproducible across runs,
machines, and worker counts.
"""

from __future__ import annotations

import numpy as np

# SeedSequence entropy words must be non-negative; fold arbitrary ints into
# the uint63 range so callers may pass any Python integer.
_WORD = 2**63


def seed_words(*words: int) -> list[int]:
    return [int(w) % _WORD for w in words]


def derive_seed(*words: int) -> int:
    """Collapse a tuple of integers into a single reproducible seed."""
    ss = np.random.SeedSequence(seed_words(*words))
    return int(ss.generate_state(1, np.uint64)[0])


def substream(*words: int) -> np.random.Generator:
    """Generator for the substream identified by ``words``.

    Streams for distinct word tuples are statistically independent, so new
    substreams can be added without perturbing existing draws.
    """
    return np.random.default_rng(np.random.SeedSequence(seed_words(*words)))
