"""Drawing weighted samples from an alias table.

Two samplers share one bucket rule.  The baseline maps a uniform draw onto
the whole table: row k0 = floor(u*N), keep the row's item if the fractional
part scaled by W/N stays below the row threshold, else take the alias.  The
sectioned sampler restricts batches of draws to contiguous row ranges so the
working set stays cache-resident, after deciding per-section sample counts
with binomial deviates.  Both are pure functions of the stream state.

Section counts are communication-free: the row range is halved recursively,
the left child receives Binomial(m, rows_left/rows_node) samples drawn from
a stream keyed by the node's row range, and recursion bottoms out at single
sections.  Any worker can recompute any subtree from the same key material,
and totals are exact by construction (m_right = m - m_left).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .backend import compile_kernel, using_numba
from .model import AliasTable, rng_uniform
from .rng import (
    MASK64,
    SALT_NODE,
    SALT_SECTION,
    RngStream,
    derive_stream,
    uniform_block_np,
    uniform_nb,
    uniform_py,
)
from .stats import _probit


class InvalidSectionSize(ValueError):
    pass


@dataclass
class SectionAssignment:
    """Per-section sample counts plus the key material that produced them."""

    section_size: int
    counts: np.ndarray
    total: int
    seed: int
    stream: int

    @property
    def n_sections(self) -> int:
        return int(self.counts.size)


def sample_one(t: AliasTable, r: RngStream) -> int:
    """One weighted draw; advances the stream counter by one."""
    u = rng_uniform(r)
    x = u * t.n
    k0 = int(x)
    if k0 >= t.n:
        k0 = t.n - 1
    if (x - k0) * t.average < t.tw[k0]:
        return k0 + 1
    return int(t.alias[k0])


if uniform_nb is not None:

    def _fill_samples(tw, alias, avg, lo, span, ctr0, strm, key, out, o0, m):
        for i in range(m):
            u = uniform_nb(ctr0 + np.uint64(i), strm, key)
            x = u * span
            k = int(x)
            if k >= span:
                k = span - 1
            row = lo + k
            if (x - k) * avg < tw[row]:
                out[o0 + i] = row + 1
            else:
                out[o0 + i] = alias[row]

    _fill_samples_nb = compile_kernel(_fill_samples)
else:
    _fill_samples_nb = None

_NP_CHUNK = 1 << 20


def _fill_samples_np(tw, alias, avg, lo, span, ctr0, strm, key, out, o0, m):
    done = 0
    while done < m:
        c = min(_NP_CHUNK, m - done)
        u = uniform_block_np((ctr0 + done) & MASK64, c, strm, key)
        x = u * span
        k = x.astype(np.int64)
        np.minimum(k, span - 1, out=k)
        rows = lo + k
        hit = (x - k) * avg < tw[rows]
        out[o0 + done : o0 + done + c] = np.where(hit, rows + 1, alias[rows])
        done += c


def _fill(t: AliasTable, lo, span, ctr0, strm, key, out, o0, m):
    if m <= 0:
        return
    if using_numba() and _fill_samples_nb is not None:
        _fill_samples_nb(
            t.tw, t.alias, t.average, lo, span,
            np.uint64(ctr0 & MASK64), np.uint64(strm & MASK64),
            np.uint64(key & MASK64), out, o0, m,
        )
    else:
        _fill_samples_np(t.tw, t.alias, t.average, lo, span, ctr0, strm, key, out, o0, m)


def sample_batch(
    t: AliasTable, m: int, r: RngStream, workers: int = 1
) -> np.ndarray:
    """m independent draws (1-based item indices); advances the counter by m.

    The output is a pure function of the stream state: splitting the counter
    range across workers cannot change it.
    """
    if m < 0:
        raise ValueError("sample count must be non-negative")
    out = np.empty(m, dtype=np.int64)
    ctr0, strm, key = r.counter, r.stream, r.seed
    eff = max(1, min(int(workers), 16))
    if m and eff > 1:
        step = -(-m // eff)
        offs = list(range(0, m, step))
        with ThreadPoolExecutor(max_workers=len(offs)) as ex:
            futs = [
                ex.submit(
                    _fill, t, 0, t.n, ctr0 + o, strm, key,
                    out, o, min(step, m - o),
                )
                for o in offs
            ]
            for f in futs:
                f.result()
    else:
        _fill(t, 0, t.n, ctr0, strm, key, out, 0, m)
    r.counter += m
    return out


def _binom_draw(m: int, q: float, u: float) -> int:
    """One Binomial(m, q) deviate from a single uniform.

    Exact CDF inversion below m = 100; above that, the rounded and clamped
    normal approximation m*q + z*sqrt(m*q*(1-q)).
    """
    if m <= 0 or q <= 0.0:
        return 0
    if q >= 1.0:
        return m
    if m < 100:
        ratio = q / (1.0 - q)
        pmf = (1.0 - q) ** m
        cdf = pmf
        k = 0
        while u > cdf and k < m:
            k += 1
            pmf *= ratio * (m - k + 1) / k
            cdf += pmf
        return k
    z = _probit(max(u, 1e-300))
    x = round(m * q + z * math.sqrt(m * q * (1.0 - q)))
    return min(max(int(x), 0), m)


def _node_uniform(seed: int, stream: int, lo_row: int, hi_row: int) -> float:
    sub = derive_stream(seed, stream, lo_row, hi_row ^ SALT_NODE)
    return uniform_py(0, sub, seed & MASK64)


def _assign_range(n_rows, S, seed, stream, a, b, m, counts, base):
    """Fill counts[base + (j - a)] for sections j in [a, b) holding m samples."""
    stack = [(a, b, m)]
    while stack:
        na, nb, nm = stack.pop()
        if nm == 0:
            continue
        if nb - na == 1:
            counts[base + (na - a)] += nm
            continue
        mid = (na + nb) // 2
        lo_row = na * S
        hi_row = min(nb * S, n_rows)
        mid_row = mid * S
        q = (mid_row - lo_row) / (hi_row - lo_row)
        u = _node_uniform(seed, stream, lo_row, hi_row)
        ml = _binom_draw(nm, q, u)
        stack.append((mid, nb, nm - ml))
        stack.append((na, mid, ml))


def assign_sections(
    n_rows: int, S: int, M: int, seed: int, stream: int = 0
) -> SectionAssignment:
    """Deterministic per-section sample counts summing exactly to M."""
    if n_rows < 1:
        raise ValueError("n_rows must be positive")
    if S < 1:
        raise InvalidSectionSize(f"section size {S} must be at least 1")
    if M < 0:
        raise ValueError("sample count must be non-negative")
    S = min(S, n_rows)
    n_sections = -(-n_rows // S)
    counts = np.zeros(n_sections, dtype=np.int64)
    _assign_range(n_rows, S, seed, stream, 0, n_sections, M, counts, 0)
    return SectionAssignment(
        section_size=S, counts=counts, total=M, seed=seed, stream=stream
    )


def assign_subtree(
    n_rows: int, S: int, seed: int, a: int, b: int, m: int, stream: int = 0
) -> np.ndarray:
    """Counts for sections [a, b) given that subtree's sample total m.

    When (a, b) is a node of the assignment recursion (the root splits at
    midpoints, so nodes are reachable by repeated halving of (0, n_sections))
    and m is that node's total, this reproduces counts[a:b] bit-exactly with
    no state beyond the key material — any worker can recompute any node.
    """
    if S < 1:
        raise InvalidSectionSize(f"section size {S} must be at least 1")
    S = min(S, n_rows)
    n_sections = -(-n_rows // S)
    if not 0 <= a < b <= n_sections:
        raise ValueError(f"subtree [{a}, {b}) outside 0..{n_sections}")
    counts = np.zeros(b - a, dtype=np.int64)
    _assign_range(n_rows, S, seed, stream, a, b, m, counts, 0)
    return counts


def sectioned_sample(t: AliasTable, S: int, M: int, r: RngStream) -> np.ndarray:
    """M draws confined section-by-section to contiguous row ranges.

    Output is section-major; the aggregate item distribution matches
    sample_batch because rows remain equally likely by construction.
    Advances the master counter by M; each section draws on its own derived
    stream so per-section counters never collide.
    """
    if M < 0:
        raise ValueError("sample count must be non-negative")
    asg = assign_sections(t.n, S, M, r.seed, r.stream)
    S_eff = asg.section_size
    out = np.empty(M, dtype=np.int64)
    off = 0
    for j in range(asg.n_sections):
        mj = int(asg.counts[j])
        if mj == 0:
            continue
        lo = j * S_eff
        span = min(lo + S_eff, t.n) - lo
        strm = derive_stream(r.seed, r.stream, j, SALT_SECTION)
        _fill(t, lo, span, r.counter, strm, r.seed, out, off, mj)
        off += mj
    r.counter += M
    return out
