"""Deterministic random-stream derivation.

Every stochastic routine in this package draws from a stream identified by
(master seed, integer key path), never from global state.  A substream is a
pure function of its key, so results are reproducible and independent of
execution order and of how work is split across workers.
"""
from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence"


def seed_sequence(seed) -> np.random.SeedSequence:
    """Normalize an int or SeedSequence into a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def substream(seed, *key: int) -> np.random.SeedSequence:
    """Child SeedSequence at `key`, derived without mutating the parent."""
    root = seed_sequence(seed)
    spawn_key = tuple(root.spawn_key) + tuple(int(k) for k in key)
    return np.random.SeedSequence(root.entropy, spawn_key=spawn_key)


def generator(seed, *key: int) -> np.random.Generator:
    """Fresh Generator for the substream at `key` (or the root if no key)."""
    ss = substream(seed, *key) if key else seed_sequence(seed)
    return np.random.default_rng(ss)


def derive_seed(seed, *key: int) -> int:
    """Collapse a substream into a plain integer seed."""
    return int(substream(seed, *key).generate_state(1, np.uint64)[0])
