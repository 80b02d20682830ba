"""Core domain types: weight sets, alias tables, and table validation.

An alias table row i holds a threshold ``tw[i]`` (mass units) and a 1-based
alias index ``alias[i]``.  Row i represents exactly one bucket of W/N mass:
``tw[i]`` of it belongs to item i+1 and the remainder to the alias item.
``validate_table`` checks that this bucket decomposition reconstructs every
item's weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import MASK64, RngStream, uniform_py

__all__ = [
    "EmptyInput",
    "InvalidWeight",
    "SizeMismatch",
    "WeightSet",
    "AliasTable",
    "ValidationReport",
    "RngStream",
    "make_weight_set",
    "validate_table",
    "rng_uniform",
]


class EmptyInput(ValueError):
    pass


class InvalidWeight(ValueError):
    """A weight is non-positive or non-finite; carries the 1-based index."""

    def __init__(self, index: int, value: float):
        self.index = int(index)
        self.value = float(value)
        super().__init__(f"weight {index} is invalid: {value!r}")


class SizeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class WeightSet:
    """Positive finite item weights, their total, and the item count.

    Immutable after construction; safe to share across threads.
    """

    weights: np.ndarray
    total: float
    n: int

    @property
    def average(self) -> float:
        """Bucket size W/N shared by every table row."""
        return self.total / self.n


@dataclass
class AliasTable:
    """N rows of (threshold, 1-based alias) plus the originating N and W.

    Treated as immutable once a constructor returns it; the mutable arrays
    exist so packing kernels can fill disjoint row ranges concurrently.
    """

    tw: np.ndarray
    alias: np.ndarray
    n: int
    total: float

    @property
    def average(self) -> float:
        return self.total / self.n

    @property
    def rows(self) -> list[tuple[float, int]]:
        return list(zip(self.tw.tolist(), self.alias.tolist()))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    worst_rel_error: float
    worst_item: int  # 1-based; 0 when the table is empty of errors


def make_weight_set(weights) -> WeightSet:
    arr = np.ascontiguousarray(weights, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("weights must be one-dimensional")
    if arr.size == 0:
        raise EmptyInput("at least one weight is required")
    bad = ~(np.isfinite(arr) & (arr > 0.0))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise InvalidWeight(i + 1, arr[i])
    arr.setflags(write=False)
    # pairwise summation: error ~ eps * log N, well inside the 1e-12 contract
    total = float(np.sum(arr))
    return WeightSet(weights=arr, total=total, n=int(arr.size))


def validate_table(
    t: AliasTable, w: WeightSet, tol: float = 1e-9
) -> ValidationReport:
    """Check row invariants and per-item mass conservation.

    Item i must receive its own threshold plus the complement W/N - tw[j] of
    every row j aliased to it, reconstructing w_i within ``tol`` relative.
    """
    if t.n != w.n:
        raise SizeMismatch(f"table has {t.n} rows, weight set has {w.n}")
    n = t.n
    avg = w.average
    tw = np.asarray(t.tw, dtype=np.float64)
    alias = np.asarray(t.alias, dtype=np.int64)

    rows_ok = bool(
        np.all(np.isfinite(tw))
        and np.all(tw >= 0.0)
        and np.all(tw <= avg * (1.0 + 1e-9))
        and np.all(alias >= 1)
        and np.all(alias <= n)
    )

    received = tw.copy()
    donated = alias != np.arange(1, n + 1)  # self-aliased rows donate nothing
    if donated.any():
        received += np.bincount(
            alias[donated] - 1, weights=avg - tw[donated], minlength=n
        )
    rel = np.abs(received - w.weights) / w.weights
    worst = int(np.argmax(rel)) if n else 0
    worst_err = float(rel[worst]) if n else 0.0
    ok = rows_ok and worst_err <= tol
    return ValidationReport(ok=ok, worst_rel_error=worst_err, worst_item=worst + 1)


def rng_uniform(r: RngStream) -> float:
    """One uniform double in [0, 1); advances the stream counter."""
    u = uniform_py(r.counter & MASK64, r.stream, r.seed)
    r.counter += 1
    return u
