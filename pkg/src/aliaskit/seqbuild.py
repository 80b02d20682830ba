"""Sequential alias-table construction (the correctness oracle).

Classic one-pass list algorithm: items are split into lights (w <= W/N) and
heavies (w > W/N) in ascending index order; the current heavy's excess fills
light buckets until its residual drops to at most W/N, at which point its own
bucket closes aliased to the next heavy and the residual merges forward.
Deliberately self-contained — it shares no traversal code with the parallel
constructors it serves as the oracle for.
"""

from __future__ import annotations

import numpy as np

from .backend import compile_kernel, using_numba
from .model import AliasTable, WeightSet


def _vose_kernel(w, avg, tw, alias):
    n = w.shape[0]
    light = np.empty(n, dtype=np.int64)  # 1-based item ids
    heavy = np.empty(n, dtype=np.int64)
    nl = 0
    nh = 0
    for i in range(n):
        if w[i] <= avg:
            light[nl] = i + 1
            nl += 1
        else:
            heavy[nh] = i + 1
            nh += 1

    k = 0  # lights consumed
    j = 0  # heavies closed
    wcur = w[heavy[0] - 1] if nh > 0 else 0.0
    while j < nh:
        if wcur > avg and k < nl:
            it = light[k]
            tw[it - 1] = w[it - 1]
            alias[it - 1] = heavy[j]
            wcur += w[it - 1] - avg
            k += 1
        else:
            it = heavy[j]
            tw[it - 1] = wcur
            if j + 1 < nh:
                alias[it - 1] = heavy[j + 1]
                wcur += w[heavy[j + 1] - 1] - avg
            else:
                # no next heavy: residual is W/N up to rounding; close full
                alias[it - 1] = it
                wcur = 0.0
            j += 1
    while k < nl:  # trailing lights have exactly-average weight; self-alias
        it = light[k]
        tw[it - 1] = w[it - 1]
        alias[it - 1] = it
        k += 1


_vose_kernel_nb = compile_kernel(_vose_kernel)


def vose_construct(w: WeightSet) -> AliasTable:
    """Build the alias table sequentially in O(N)."""
    tw = np.zeros(w.n, dtype=np.float64)
    alias = np.zeros(w.n, dtype=np.int64)
    kern = _vose_kernel_nb if using_numba() else _vose_kernel
    kern(w.weights, w.average, tw, alias)
    return AliasTable(tw=tw, alias=alias, n=w.n, total=w.total)
