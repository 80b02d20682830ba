"""Seeded weight-set generators for benchmarks and tests.

Both generators consume the shared counter-based stream, so outputs are
reproducible across runs, backends, and worker counts.
"""

from __future__ import annotations

import numpy as np

from .model import WeightSet, make_weight_set
from .rng import RngStream, uniform_block


def gen_uniform(n: int, r: RngStream) -> WeightSet:
    """n draws from (0, 1): exact zeros are redrawn at fresh counters."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = uniform_block(r, n)
    zeros = np.nonzero(w == 0.0)[0]
    while zeros.size:
        w[zeros] = uniform_block(r, zeros.size)
        zeros = zeros[np.nonzero(w[zeros] == 0.0)[0]]
    return make_weight_set(w)


def gen_power_law(n: int, alpha: float, r: RngStream) -> WeightSet:
    """Weights i**(-alpha) for i = 1..n in seeded shuffled order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    w = np.arange(1, n + 1, dtype=np.float64) ** -np.float64(alpha)
    u = uniform_block(r, n)
    return make_weight_set(w[np.argsort(u, kind="stable")])
