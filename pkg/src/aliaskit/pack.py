"""Bucket writing for split construction.

Each section replays the sequential pairing over its own budget of light and
heavy items, taken from a split plan.  The running residual starts from the
boundary spill (or the first budgeted heavy's full weight), so sections agree
bucket-for-bucket with a single sequential pass over the whole input.

The chunked variant reads items through small staging buffers and refills a
buffer once more than two thirds of it has been consumed, keeping live data
resident while the tail of the previous load is still needed.  It is
arithmetic-identical to the plain variant.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .backend import compile_kernel, using_numba
from .model import AliasTable, WeightSet
from .partition import LightHeavyPartition, greedy_prepack, partition_items
from .split import SplitPlan, compute_split_plan


class PlanInconsistent(ValueError):
    pass


def _pack_range(
    l_idx, l_w, h_idx, h_w, lcounts, hcounts, spills, i0, i1, avg, tw, alias, out_spills
):
    nh = h_idx.shape[0]
    for sec in range(i0, i1 + 1):
        la = lcounts[sec - 1]
        lb = lcounts[sec]
        ha = hcounts[sec - 1]
        hb = hcounts[sec]
        spill_in = spills[sec - 1]
        k = la
        j = ha
        if j < nh:
            w = spill_in if spill_in > 0.0 else h_w[j]
        else:
            w = 0.0
        while k < lb or j < hb:
            if j < nh and w > avg and k < lb:
                # current heavy can absorb a light: light keeps its own weight
                it = l_idx[k]
                tw[it - 1] = l_w[k]
                alias[it - 1] = h_idx[j]
                w += l_w[k] - avg
                k += 1
            elif j < hb:
                # close the current heavy at its residual
                it = h_idx[j]
                tw[it - 1] = w
                if j + 1 < nh:
                    alias[it - 1] = h_idx[j + 1]
                    w += h_w[j + 1] - avg
                else:
                    alias[it - 1] = it
                    w = 0.0
                j += 1
            else:
                # no heavy mass left for this budget: light fills its own row
                it = l_idx[k]
                tw[it - 1] = l_w[k]
                alias[it - 1] = it
                k += 1
        out_spills[sec - i0] = w if j < nh else 0.0


def _chunked_pack_range(
    l_idx,
    l_w,
    h_idx,
    h_w,
    lcounts,
    hcounts,
    spills,
    i0,
    i1,
    avg,
    cap_items,
    tw,
    alias,
    out_spills,
    sl_idx,
    sl_w,
    sh_idx,
    sh_w,
):
    nh = h_idx.shape[0]
    for sec in range(i0, i1 + 1):
        la = lcounts[sec - 1]
        lb = lcounts[sec]
        ha = hcounts[sec - 1]
        hb = hcounts[sec]
        spill_in = spills[sec - 1]
        # heavy staging must extend one item past the budget: closing heavy j
        # peeks at j+1, and boundary lights fill under heavy hb itself
        hext = hb + 1 if hb + 1 < nh else nh
        k = la
        j = ha
        lw_lo = la
        lw_hi = la
        hw_lo = ha
        hw_hi = ha
        if j < nh:
            if spill_in > 0.0:
                w = spill_in
            else:
                hw_lo = j
                hw_hi = j + cap_items if j + cap_items < hext else hext
                for t in range(hw_lo, hw_hi):
                    sh_idx[t - hw_lo] = h_idx[t]
                    sh_w[t - hw_lo] = h_w[t]
                w = sh_w[0]
        else:
            w = 0.0
        while k < lb or j < hb:
            if k < lb and (k >= lw_hi or 3 * (k - lw_lo) > 2 * cap_items):
                lw_lo = k
                lw_hi = k + cap_items if k + cap_items < lb else lb
                for t in range(lw_lo, lw_hi):
                    sl_idx[t - lw_lo] = l_idx[t]
                    sl_w[t - lw_lo] = l_w[t]
            if j < hext and (
                j >= hw_hi
                or (hw_hi < hext and 3 * ((j + 1) - hw_lo) > 2 * cap_items)
            ):
                hw_lo = j
                hw_hi = j + cap_items if j + cap_items < hext else hext
                for t in range(hw_lo, hw_hi):
                    sh_idx[t - hw_lo] = h_idx[t]
                    sh_w[t - hw_lo] = h_w[t]
            if j < nh and w > avg and k < lb:
                it = sl_idx[k - lw_lo]
                tw[it - 1] = sl_w[k - lw_lo]
                alias[it - 1] = sh_idx[j - hw_lo]
                w += sl_w[k - lw_lo] - avg
                k += 1
            elif j < hb:
                it = sh_idx[j - hw_lo]
                tw[it - 1] = w
                if j + 1 < nh:
                    alias[it - 1] = sh_idx[j + 1 - hw_lo]
                    w += sh_w[j + 1 - hw_lo] - avg
                else:
                    alias[it - 1] = it
                    w = 0.0
                j += 1
            else:
                it = sl_idx[k - lw_lo]
                tw[it - 1] = sl_w[k - lw_lo]
                alias[it - 1] = it
                k += 1
        out_spills[sec - i0] = w if j < nh else 0.0


_pack_range_nb = compile_kernel(_pack_range)
_chunked_pack_range_nb = compile_kernel(_chunked_pack_range)


def _check_plan(p: LightHeavyPartition, plan: SplitPlan) -> None:
    s = plan.s
    lc, hc = plan.lcounts, plan.hcounts
    if lc.shape != (s + 1,) or hc.shape != (s + 1,) or plan.spills.shape != (s + 1,):
        raise PlanInconsistent("plan arrays must have s+1 boundary records")
    if lc[0] != 0 or hc[0] != 0 or lc[s] != p.l_index.size or hc[s] != p.h_index.size:
        raise PlanInconsistent("plan endpoints do not close over the partition")
    if np.any(np.diff(lc) < 0) or np.any(np.diff(hc) < 0):
        raise PlanInconsistent("boundary counts must be non-decreasing")


def _run_range(p, plan, i0, i1, avg, tw, alias, chunked, cap_items):
    out = np.empty(i1 - i0 + 1, dtype=np.float64)
    if chunked:
        sl_idx = np.empty(cap_items, dtype=np.int64)
        sl_w = np.empty(cap_items, dtype=np.float64)
        sh_idx = np.empty(cap_items, dtype=np.int64)
        sh_w = np.empty(cap_items, dtype=np.float64)
        kern = _chunked_pack_range_nb if using_numba() else _chunked_pack_range
        kern(
            p.l_index, p.l_weight, p.h_index, p.h_weight,
            plan.lcounts, plan.hcounts, plan.spills,
            i0, i1, avg, cap_items, tw, alias, out,
            sl_idx, sl_w, sh_idx, sh_w,
        )
    else:
        kern = _pack_range_nb if using_numba() else _pack_range
        kern(
            p.l_index, p.l_weight, p.h_index, p.h_weight,
            plan.lcounts, plan.hcounts, plan.spills,
            i0, i1, avg, tw, alias, out,
        )
    return out


def pack_section(
    p: LightHeavyPartition, plan: SplitPlan, i: int, out: AliasTable
) -> float:
    """Write section i's buckets into ``out``; returns the outgoing residual.

    The return value is the mass left on the heavy item still open when the
    section's budget ends (0.0 when every heavy has been closed).
    """
    _check_plan(p, plan)
    if not 1 <= i <= plan.s:
        raise PlanInconsistent(f"section {i} outside 1..{plan.s}")
    spill = _run_range(p, plan, i, i, p.avg, out.tw, out.alias, False, 0)
    return float(spill[0])


def chunked_pack_section(
    p: LightHeavyPartition,
    plan: SplitPlan,
    i: int,
    chunk_capacity: int,
    out: AliasTable,
) -> float:
    """Staged-buffer variant of :func:`pack_section`; same bucket output."""
    _check_plan(p, plan)
    if not 1 <= i <= plan.s:
        raise PlanInconsistent(f"section {i} outside 1..{plan.s}")
    if chunk_capacity < 2:
        raise ValueError("chunk_capacity must be at least 2")
    spill = _run_range(
        p, plan, i, i, p.avg, out.tw, out.alias, True, int(chunk_capacity)
    )
    return float(spill[0])


def _pack_all(p, plan, workers, chunked, chunk_capacity, tw, alias):
    s = plan.s
    eff = max(1, min(int(workers), s))
    if eff == 1:
        _run_range(p, plan, 1, s, p.avg, tw, alias, chunked, chunk_capacity)
        return
    bounds = [1 + (t * s) // eff for t in range(eff)] + [s + 1]
    with ThreadPoolExecutor(max_workers=eff) as ex:
        futs = [
            ex.submit(
                _run_range, p, plan, bounds[t], bounds[t + 1] - 1,
                p.avg, tw, alias, chunked, chunk_capacity,
            )
            for t in range(eff)
            if bounds[t + 1] > bounds[t]
        ]
        for f in futs:
            f.result()


def psa_construct(
    w: WeightSet,
    s: int = 64,
    workers: int = 1,
    chunked: bool = False,
    chunk_capacity: int = 1024,
) -> AliasTable:
    """Split construction: plan boundaries, then pack sections independently."""
    if s < 1:
        raise ValueError("section count must be positive")
    if workers < 1:
        raise ValueError("worker count must be positive")
    if chunked and chunk_capacity < 2:
        raise ValueError("chunk_capacity must be at least 2")
    p = partition_items(w)
    s_eff = min(s, w.n)
    plan = compute_split_plan(p, s_eff)
    tw = np.zeros(w.n, dtype=np.float64)
    alias = np.zeros(w.n, dtype=np.int64)
    _pack_all(p, plan, workers, chunked, chunk_capacity, tw, alias)
    if np.count_nonzero(alias) != w.n:
        raise PlanInconsistent("pack left buckets unwritten")
    return AliasTable(tw=tw, alias=alias, n=w.n, total=w.total)


def psa_plus_construct(
    w: WeightSet,
    s: int = 64,
    workers: int = 1,
    block_size: int = 4096,
    threshold: int = 8,
) -> AliasTable:
    """Split construction preceded by the block-local pairing pass.

    Buckets handled by the prepack are final; only the residual items go
    through the plan/pack machinery.
    """
    if s < 1:
        raise ValueError("section count must be positive")
    if workers < 1:
        raise ValueError("worker count must be positive")
    pre = greedy_prepack(w, block_size=block_size, min_pair_threshold=threshold)
    tw = pre.tw
    alias = pre.alias
    res = pre.residual
    if res.n > 0:
        plan = compute_split_plan(res, min(s, res.n))
        _pack_all(res, plan, workers, False, 0, tw, alias)
    if np.count_nonzero(alias) != w.n:
        raise PlanInconsistent("pack left buckets unwritten")
    return AliasTable(tw=tw, alias=alias, n=w.n, total=w.total)
