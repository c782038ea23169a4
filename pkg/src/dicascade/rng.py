"""Seeded random streams.

All randomness goes through numpy's ``PCG64`` bit generator, seeded from a
``SeedSequence`` built out of integer keys.  PCG64 output is specified
independently of platform, so a given key path yields the same stream
everywhere.
"""

from __future__ import annotations

import numpy as np

# stream identifiers used by the pipeline
STREAM_SAMPLE = 1
STREAM_BALANCE = 2
STREAM_GRAPH = 3
STREAM_REPLICA = 4


def make_rng(seed, *keys: int) -> np.random.Generator:
    """Return a PCG64 generator for the key path ``(seed, *keys)``.

    Passing an existing ``Generator`` returns it unchanged so callers can
    thread a stream through several operations.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    entropy = [int(seed), *(int(k) for k in keys)]
    if any(e < 0 for e in entropy):
        raise ValueError("seeds and stream keys must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def exponential(rng: np.random.Generator, rate: float) -> float:
    """Exp(rate) waiting time by inverse transform; ``inf`` when rate is 0."""
    if rate <= 0.0:
        return float("inf")
    return -np.log1p(-rng.random()) / rate
