"""Counter-based pseudorandom numbers.

The generator is a 2x64 Philox-style bijection (10 rounds, the customary
multiplier/Weyl constants): every output is a pure function of
``(seed, stream, counter)``, so any worker can regenerate any draw — or derive
an independent stream for a recursion node — without communication or shared
state.  Three implementations produce bit-identical output: a Python-int
scalar (fallback scalar path), a vectorized numpy block (fallback bulk path),
and an ``@njit`` scalar for use inside compiled kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import compile_kernel, using_numba

MASK64 = (1 << 64) - 1
_MULT = 0xD2B74407B1CE6E93
_WEYL = 0x9E3779B97F4A7C15
_ROUNDS = 10
# 2^-53: top 53 bits of the counter word become a double in [0, 1)
_INV53 = 1.0 / 9007199254740992.0
# domain salts so stream derivations for different purposes cannot collide
SALT_STREAM = 0x6A09E667F3BCC909
SALT_NODE = 0xBB67AE8584CAA73B
SALT_SECTION = 0x3C6EF372FE94F82B


@dataclass
class RngStream:
    """Deterministic stream handle: output depends only on these fields.

    Single-owner: concurrent users must derive distinct ``stream`` values.
    The counter is a plain Python int and is masked to 64 bits on use.
    """

    seed: int
    stream: int = 0
    counter: int = 0

    def __post_init__(self) -> None:
        self.seed = int(self.seed) & MASK64
        self.stream = int(self.stream) & MASK64
        self.counter = int(self.counter)

    def clone(self) -> "RngStream":
        return RngStream(self.seed, self.stream, self.counter)


def _philox_py(ctr: int, strm: int, key: int) -> int:
    """One 2x64 block, Python-int arithmetic; returns the first output word."""
    x0 = ctr & MASK64
    x1 = strm & MASK64
    k = key & MASK64
    for _ in range(_ROUNDS):
        prod = x0 * _MULT
        hi = (prod >> 64) & MASK64
        lo = prod & MASK64
        x0 = hi ^ k ^ x1
        x1 = lo
        k = (k + _WEYL) & MASK64
    return x0


def uniform_py(ctr: int, strm: int, key: int) -> float:
    return (_philox_py(ctr, strm, key) >> 11) * _INV53


# --- vectorized numpy path (uint64 arrays wrap silently) ---

_U_MULT = np.uint64(_MULT)
_U_WEYL = np.uint64(_WEYL)
_U_MASK32 = np.uint64(0xFFFFFFFF)
_U32 = np.uint64(32)
_U11 = np.uint64(11)


def philox_block_np(ctr0: int, m: int, strm: int, key: int) -> np.ndarray:
    """Raw 64-bit outputs for counters ctr0 .. ctr0+m-1 (vectorized)."""
    x0 = np.arange(m, dtype=np.uint64) + np.uint64(ctr0 & MASK64)
    x1 = np.full(m, strm & MASK64, dtype=np.uint64)
    k = key & MASK64  # kept as a Python int: numpy scalar adds warn on wrap
    for _ in range(_ROUNDS):
        # 128-bit product of x0 * MULT via 32-bit limbs
        ahi = x0 >> _U32
        alo = x0 & _U_MASK32
        bhi = _U_MULT >> _U32
        blo = _U_MULT & _U_MASK32
        lolo = alo * blo
        mid = ahi * blo + (lolo >> _U32) + ((alo * bhi) & _U_MASK32)
        hi = ahi * bhi + (mid >> _U32) + ((alo * bhi) >> _U32)
        lo = x0 * _U_MULT
        x0 = hi ^ np.uint64(k) ^ x1
        x1 = lo
        k = (k + _WEYL) & MASK64
    return x0


def uniform_block_np(ctr0: int, m: int, strm: int, key: int) -> np.ndarray:
    return (philox_block_np(ctr0, m, strm, key) >> _U11) * _INV53


# --- numba scalar twin (uint64 casts; only ever called compiled) ---


def _philox_u64(ctr, strm, key):
    x0 = np.uint64(ctr)
    x1 = np.uint64(strm)
    k = np.uint64(key)
    mask32 = np.uint64(0xFFFFFFFF)
    s32 = np.uint64(32)
    mult = np.uint64(0xD2B74407B1CE6E93)
    weyl = np.uint64(0x9E3779B97F4A7C15)
    for _ in range(10):
        ahi = x0 >> s32
        alo = x0 & mask32
        bhi = mult >> s32
        blo = mult & mask32
        lolo = alo * blo
        mid = ahi * blo + (lolo >> s32) + ((alo * bhi) & mask32)
        hi = ahi * bhi + (mid >> s32) + ((alo * bhi) >> s32)
        lo = x0 * mult
        x0 = hi ^ k ^ x1
        x1 = lo
        k += weyl
    return x0


philox_nb = compile_kernel(_philox_u64)

# Compiled callers must reference compiled callees, so the jitted helpers are
# defined in terms of the dispatcher objects (resolved at first compile).
if philox_nb is not None:

    def _uniform_u64(ctr, strm, key):
        return np.float64(philox_nb(ctr, strm, key) >> np.uint64(11)) * _INV53

    uniform_nb = compile_kernel(_uniform_u64)

    def _fill_uniform(out, ctr0, strm, key):
        for i in range(out.shape[0]):
            out[i] = uniform_nb(ctr0 + np.uint64(i), strm, key)

    _fill_uniform_nb = compile_kernel(_fill_uniform)
else:  # pragma: no cover - numba-free host
    uniform_nb = None
    _fill_uniform_nb = None


def uniform_block(r: RngStream, m: int) -> np.ndarray:
    """m uniform doubles in [0, 1) from r's current counter; advances r by m."""
    ctr0 = r.counter & MASK64
    if using_numba():
        out = np.empty(m, dtype=np.float64)
        _fill_uniform_nb(
            out, np.uint64(ctr0), np.uint64(r.stream), np.uint64(r.seed)
        )
    else:
        out = uniform_block_np(ctr0, m, r.stream, r.seed)
    r.counter += m
    return out


def derive_stream(seed: int, stream: int, tag0: int, tag1: int) -> int:
    """Independent 64-bit stream id for a tagged purpose (pure function)."""
    return _philox_py(tag0, tag1 ^ stream, seed ^ SALT_STREAM)
