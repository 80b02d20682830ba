"""Light/heavy partitioning with prefix sums, plus greedy block prepacking.

``partition_items`` classifies items into light (w <= W/N) and heavy arrays in
ascending item order, co-locating weights with indices, and builds
exclusive compensated prefix sums L and H — the inputs every split/pack step
searches.  ``greedy_prepack`` additionally pairs lights with heavies inside
fixed-size blocks before any global coordination, writing finished rows
immediately and forwarding only leftovers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import compile_kernel, using_numba
from .model import WeightSet


@dataclass
class LightHeavyPartition:
    """Index/weight arrays for both classes plus exclusive prefix sums.

    ``lprefix`` has length |l|+1 with lprefix[0] = 0; likewise ``hprefix``.
    ``avg`` is the bucket size W/N of the originating weight set (also for
    residual partitions, whose items still fill full-size buckets).
    """

    l_index: np.ndarray
    l_weight: np.ndarray
    h_index: np.ndarray
    h_weight: np.ndarray
    lprefix: np.ndarray
    hprefix: np.ndarray
    avg: float

    @property
    def n(self) -> int:
        return int(self.l_index.size + self.h_index.size)

    @property
    def l(self) -> list[tuple[int, float]]:
        return list(zip(self.l_index.tolist(), self.l_weight.tolist()))

    @property
    def h(self) -> list[tuple[int, float]]:
        return list(zip(self.h_index.tolist(), self.h_weight.tolist()))


@dataclass
class PrepackResult:
    """Partially written table buffer plus the partition of leftover items."""

    tw: np.ndarray
    alias: np.ndarray
    written: np.ndarray
    residual: LightHeavyPartition
    handled_fraction: float


def _prefix_kernel(values, out):
    # Neumaier running compensation; out[k] = sum of values[:k]
    s = 0.0
    c = 0.0
    out[0] = 0.0
    for i in range(values.shape[0]):
        v = values[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i + 1] = s + c


_prefix_kernel_nb = compile_kernel(_prefix_kernel)


def _exclusive_prefix(values: np.ndarray) -> np.ndarray:
    out = np.empty(values.size + 1, dtype=np.float64)
    kern = _prefix_kernel_nb if using_numba() else _prefix_kernel
    kern(values, out)
    return out


def _classify_kernel(w, avg, l_idx, l_w, h_idx, h_w):
    nl = 0
    nh = 0
    for i in range(w.shape[0]):
        if w[i] <= avg:
            l_idx[nl] = i + 1
            l_w[nl] = w[i]
            nl += 1
        else:
            h_idx[nh] = i + 1
            h_w[nh] = w[i]
            nh += 1
    return nl, nh


_classify_kernel_nb = compile_kernel(_classify_kernel)


def partition_items(w: WeightSet) -> LightHeavyPartition:
    """Split items into light/heavy arrays (ascending) with prefix sums."""
    avg = w.average
    if using_numba():
        l_idx = np.empty(w.n, dtype=np.int64)
        l_w = np.empty(w.n, dtype=np.float64)
        h_idx = np.empty(w.n, dtype=np.int64)
        h_w = np.empty(w.n, dtype=np.float64)
        nl, nh = _classify_kernel_nb(w.weights, avg, l_idx, l_w, h_idx, h_w)
        l_idx, l_w = l_idx[:nl].copy(), l_w[:nl].copy()
        h_idx, h_w = h_idx[:nh].copy(), h_w[:nh].copy()
    else:
        mask = w.weights <= avg
        l_idx = np.flatnonzero(mask).astype(np.int64) + 1
        l_w = w.weights[mask]
        h_idx = np.flatnonzero(~mask).astype(np.int64) + 1
        h_w = w.weights[~mask]
    return LightHeavyPartition(
        l_index=l_idx,
        l_weight=np.ascontiguousarray(l_w),
        h_index=h_idx,
        h_weight=np.ascontiguousarray(h_w),
        lprefix=_exclusive_prefix(l_w),
        hprefix=_exclusive_prefix(h_w),
        avg=avg,
    )


def _greedy_kernel(
    w, avg, block_size, threshold, tw, alias, written, res_idx, res_w, res_light
):
    n = w.shape[0]
    lloc = np.empty(block_size, dtype=np.int64)
    hloc = np.empty(block_size, dtype=np.int64)
    nres = 0
    nwritten = 0
    for b0 in range(0, n, block_size):
        b1 = min(b0 + block_size, n)
        nl = 0
        nh = 0
        for i in range(b0, b1):
            wi = w[i]
            if wi == avg:
                # exactly-full bucket: finishable regardless of pairing
                tw[i] = wi
                alias[i] = i + 1
                written[i] = 1
                nwritten += 1
            elif wi < avg:
                lloc[nl] = i + 1
                nl += 1
            else:
                hloc[nh] = i + 1
                nh += 1

        k = 0
        jnext = 0  # first heavy not yet sent to residual
        cur = -1  # reclassified partially-consumed heavy (item id), if any
        curw = 0.0
        if nl >= threshold and nh >= threshold:
            j = 0
            wcur = w[hloc[0] - 1]
            while True:
                if wcur > avg:
                    if k == nl:
                        break  # out of lights: current heavy goes to residual
                    it = lloc[k]
                    tw[it - 1] = w[it - 1]
                    alias[it - 1] = hloc[j]
                    written[it - 1] = 1
                    nwritten += 1
                    wcur += w[it - 1] - avg
                    k += 1
                else:
                    if j + 1 >= nh:
                        break  # cannot close without a next heavy to merge into
                    it = hloc[j]
                    tw[it - 1] = wcur
                    alias[it - 1] = hloc[j + 1]
                    written[it - 1] = 1
                    nwritten += 1
                    wcur += w[hloc[j + 1] - 1] - avg
                    j += 1
            if wcur == avg:
                it = hloc[j]
                tw[it - 1] = wcur
                alias[it - 1] = it
                written[it - 1] = 1
                nwritten += 1
            else:
                cur = hloc[j]
                curw = wcur
            jnext = j + 1

        # forward leftovers in ascending item order (merge of three
        # ascending streams: remaining lights, remaining heavies, and the
        # reclassified current heavy)
        ia = k
        ib = jnext
        while ia < nl or ib < nh or cur >= 0:
            cand = n + 2
            if ia < nl:
                cand = lloc[ia]
            if ib < nh and hloc[ib] < cand:
                cand = hloc[ib]
            if cur >= 0 and cur < cand:
                res_idx[nres] = cur
                res_w[nres] = curw
                res_light[nres] = 1 if curw <= avg else 0
                cur = -1
            elif ia < nl and cand == lloc[ia]:
                res_idx[nres] = cand
                res_w[nres] = w[cand - 1]
                res_light[nres] = 1
                ia += 1
            else:
                res_idx[nres] = cand
                res_w[nres] = w[cand - 1]
                res_light[nres] = 0
                ib += 1
            nres += 1
    return nres, nwritten


_greedy_kernel_nb = compile_kernel(_greedy_kernel)


def greedy_prepack(
    w: WeightSet, block_size: int = 4096, min_pair_threshold: int = 8
) -> PrepackResult:
    """Pair lights and heavies block-locally, forwarding leftovers.

    A block participates only when it holds at least ``min_pair_threshold``
    lights and as many heavies; pairing stops when either side runs out, and
    a partially consumed heavy is reclassified by its residual weight.
    """
    if block_size < 2:
        raise ValueError("block_size must be at least 2")
    if min_pair_threshold < 1:
        raise ValueError("min_pair_threshold must be at least 1")
    n = w.n
    tw = np.zeros(n, dtype=np.float64)
    alias = np.zeros(n, dtype=np.int64)
    written = np.zeros(n, dtype=np.uint8)
    res_idx = np.empty(n, dtype=np.int64)
    res_w = np.empty(n, dtype=np.float64)
    res_light = np.empty(n, dtype=np.uint8)
    kern = _greedy_kernel_nb if using_numba() else _greedy_kernel
    nres, nwritten = kern(
        w.weights,
        w.average,
        block_size,
        min_pair_threshold,
        tw,
        alias,
        written,
        res_idx,
        res_w,
        res_light,
    )
    lmask = res_light[:nres] == 1
    residual = LightHeavyPartition(
        l_index=res_idx[:nres][lmask].copy(),
        l_weight=res_w[:nres][lmask].copy(),
        h_index=res_idx[:nres][~lmask].copy(),
        h_weight=res_w[:nres][~lmask].copy(),
        lprefix=_exclusive_prefix(res_w[:nres][lmask]),
        hprefix=_exclusive_prefix(res_w[:nres][~lmask]),
        avg=w.average,
    )
    return PrepackResult(
        tw=tw,
        alias=alias,
        written=written.astype(bool),
        residual=residual,
        handled_fraction=nwritten / n,
    )
