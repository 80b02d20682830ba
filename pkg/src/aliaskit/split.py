"""Section boundary computation and batched search primitives.

A split plan records, for each of s section boundaries, how many light and
heavy items the sequential construction would have fully consumed after
n_i = floor(i*N/s) bucket writes, plus the leftover mass (``spill``) of the
heavy item straddling the boundary.  Boundary i is found by binary search
over the light/heavy prefix sums: the state is the greatest heavy count h
such that L[n_i - h] + H[h] <= n_i * W/N, because every heavy outweighs every
light, making feasibility monotone in h.  Each boundary is independent of the
others, so plans parallelize trivially.

``partial_pary_search`` is the batch lower-bound primitive: a shared
contraction phase probes p equally spaced pivots against the batch's min and
max until the remaining range is small or stops shrinking, then each query
finishes with an ordinary binary search inside the contracted range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import compile_kernel, using_numba
from .partition import LightHeavyPartition


class InvalidSectionCount(ValueError):
    pass


class UnsortedInput(ValueError):
    pass


@dataclass
class SplitPlan:
    """Boundary records 0..s; boundary 0 is (0,0,0), boundary s closes all."""

    s: int
    lcounts: np.ndarray
    hcounts: np.ndarray
    spills: np.ndarray

    @property
    def boundaries(self) -> list[tuple[int, int, float]]:
        return list(
            zip(self.lcounts.tolist(), self.hcounts.tolist(), self.spills.tolist())
        )


def _fill_plan_kernel(lpre, hpre, h_w, n_total, s, avg, lcounts, hcounts, spills):
    nl = lpre.shape[0] - 1
    nh = hpre.shape[0] - 1
    lcounts[0] = 0
    hcounts[0] = 0
    spills[0] = 0.0
    lcounts[s] = nl
    hcounts[s] = nh
    spills[s] = 0.0
    for i in range(1, s):
        ni = (i * n_total) // s
        cap = ni * avg
        lo = ni - nl
        if lo < 0:
            lo = 0
        hi = ni if ni < nh else nh
        best = lo
        a = lo
        b = hi
        while a <= b:
            mid = (a + b) >> 1
            if lpre[ni - mid] + hpre[mid] <= cap:
                best = mid
                a = mid + 1
            else:
                b = mid - 1
        h = best
        l = ni - h
        taken = cap - (lpre[l] + hpre[h])
        sp = 0.0
        if h < nh and taken > 0.0:
            sp = h_w[h] - taken
            if sp < 0.0:
                sp = 0.0
        lcounts[i] = l
        hcounts[i] = h
        spills[i] = sp


_fill_plan_kernel_nb = compile_kernel(_fill_plan_kernel)


def compute_split_plan(p: LightHeavyPartition, s: int) -> SplitPlan:
    """Boundary states for s sections of floor-balanced item counts."""
    n = p.n
    if s < 1 or s > max(n, 1):
        raise InvalidSectionCount(f"s={s} not in [1, {max(n, 1)}]")
    lcounts = np.empty(s + 1, dtype=np.int64)
    hcounts = np.empty(s + 1, dtype=np.int64)
    spills = np.empty(s + 1, dtype=np.float64)
    kern = _fill_plan_kernel_nb if using_numba() else _fill_plan_kernel
    kern(p.lprefix, p.hprefix, p.h_weight, n, s, p.avg, lcounts, hcounts, spills)
    return SplitPlan(s=s, lcounts=lcounts, hcounts=hcounts, spills=spills)


def binary_search_boundary(
    p: LightHeavyPartition, n_i: int, cap: float
) -> tuple[int, int, float]:
    """Boundary state after n_i bucket writes against mass budget ``cap``.

    Returns (light count, heavy count, spill).  Kept as a scalar Python
    replica of the plan kernel's search; the two are cross-checked in tests.
    """
    nl = p.l_index.size
    nh = p.h_index.size
    if not 0 <= n_i <= nl + nh:
        raise ValueError(f"n_i={n_i} outside [0, {nl + nh}]")
    lpre, hpre = p.lprefix, p.hprefix
    lo = max(0, n_i - nl)
    hi = min(n_i, nh)
    best = lo
    a, b = lo, hi
    while a <= b:
        mid = (a + b) >> 1
        if lpre[n_i - mid] + hpre[mid] <= cap:
            best = mid
            a = mid + 1
        else:
            b = mid - 1
    h = best
    l = n_i - h
    taken = cap - (float(lpre[l]) + float(hpre[h]))
    spill = 0.0
    if h < nh and taken > 0.0:
        spill = max(float(p.h_weight[h]) - taken, 0.0)
    return int(l), int(h), spill


def _lower_bound_kernel(hay, queries, a, b, out):
    for qi in range(queries.shape[0]):
        q = queries[qi]
        lo = a
        hi = b
        while lo < hi:
            mid = (lo + hi) >> 1
            if hay[mid] < q:
                lo = mid + 1
            else:
                hi = mid
        out[qi] = lo


_lower_bound_kernel_nb = compile_kernel(_lower_bound_kernel)


def _contract_range(hay: np.ndarray, qmin: float, qmax: float, p: int):
    """Phase 1: shrink the shared search range with p pivots per round.

    Returns (a, b, rounds) with every query's lower-bound index in [a, b].
    """
    a = 0
    b = int(hay.size)
    rounds = 0
    while b - a > p:
        rounds += 1
        width = b - a
        gs = -1  # greatest pivot strictly below the whole batch
        ls = -1  # least pivot strictly above the whole batch
        t_gs = -1
        t_ls = -1
        for t in range(p):
            s = a + t * (width - 1) // (p - 1)
            v = hay[s]
            if v < qmin:
                gs = s
                t_gs = t
            elif v > qmax and ls < 0:
                ls = s
                t_ls = t
        na = gs + 1 if gs >= 0 else a
        nb = ls if ls >= 0 else b
        band = (t_ls if t_ls >= 0 else p) - (t_gs if t_gs >= 0 else -1)
        a, b = na, nb
        if band >= p - 2 or 2 * (b - a) > width:
            break  # batch spans nearly all pivots, or contraction stalled
    return a, b, rounds


def partial_pary_search(
    haystack, queries, p: int = 32
) -> np.ndarray:
    """Lower-bound indices of a sorted query batch in a sorted haystack.

    Element-wise identical to independent binary searches; the p-ary phase
    only narrows the range all queries share.
    """
    hay = np.ascontiguousarray(haystack, dtype=np.float64)
    q = np.ascontiguousarray(queries, dtype=np.float64)
    if p < 3:
        raise ValueError("fanout p must be at least 3")
    if hay.size > 1 and np.any(hay[1:] < hay[:-1]):
        raise UnsortedInput("haystack is not sorted ascending")
    if q.size > 1 and np.any(q[1:] < q[:-1]):
        raise UnsortedInput("query batch is not sorted ascending")
    if q.size == 0:
        return np.empty(0, dtype=np.int64)
    a, b, _ = _contract_range(hay, float(q[0]), float(q[-1]), p)
    if using_numba():
        out = np.empty(q.size, dtype=np.int64)
        _lower_bound_kernel_nb(hay, q, a, b, out)
        return out
    return np.searchsorted(hay[a:b], q, side="left").astype(np.int64) + a
