"""Deterministic stream derivation for reproducible Monte Carlo.

The documented mixing function is numpy's SeedSequence spawn-key scheme:
stream (master_seed, k1, k2, ...) is PCG64 seeded with
``SeedSequence(master_seed, spawn_key=(k1, k2, ...))``.  Distinct keys give
statistically independent streams, so path i of an ensemble may use
``generator(master_seed, i)`` concurrently with every other path.

Named sub-stream constants keep the driving noise, the exponential kill
clock, and the within-step bridge maxima on separate streams: varying the
kill rate beta replays the identical driving path (and the identical kill
uniform, enabling the monotonicity-in-beta test).
"""

from __future__ import annotations

import numpy as np

DRIVING = 0
KILL = 1
BRIDGE = 2
HOLD = 3


def generator(master_seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for the stream (master_seed, *key)."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def exponential_from_uniform(u: float, rate: float) -> float:
    """Inverse-CDF exponential S = -ln(u)/rate.

    Sampling through the explicit inverse keeps S monotone decreasing in
    `rate` for a shared uniform, which the kill-ordering property relies on.
    """
    if rate <= 0:
        raise ValueError("rate must be positive")
    u = float(u)
    if u <= 0.0:  # numpy's random() can return exactly 0.0
        u = 5e-324
    return -np.log(u) / rate
