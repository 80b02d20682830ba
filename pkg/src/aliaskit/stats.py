"""Frequency accumulation and chi-square goodness-of-fit testing.

This is the verification arm of the package: sampling contracts are checked
by counting draws per item and comparing against the weight distribution.
The chi-square critical value comes from the Wilson-Hilferty cube
approximation, so no quantile tables or external stats dependencies are
needed.
"""

from __future__ import annotations

import math

import numpy as np


class IndexOutOfRange(ValueError):
    pass


class DegenerateBins(ValueError):
    pass


def frequency_counts(samples, n: int) -> np.ndarray:
    """Exact per-item counts of 1-based sample indices."""
    if n < 1:
        raise ValueError("item count must be positive")
    s = np.asarray(samples, dtype=np.int64)
    if s.size and (s.min() < 1 or s.max() > n):
        raise IndexOutOfRange(f"sample indices must lie in 1..{n}")
    return np.bincount(s, minlength=n + 1)[1:]


# Acklam's rational approximation to the standard normal quantile,
# |relative error| < 1.15e-9 over the open unit interval.
_PROBIT_A = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_PROBIT_B = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_PROBIT_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_PROBIT_D = (
    7.784695709041462e-03, 3.224671290700398e-01,
    2.445134137142996e+00, 3.754408661907416e+00,
)
_PROBIT_PLOW = 0.02425


def _probit(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError("probit defined on the open unit interval")
    a, b, c, d = _PROBIT_A, _PROBIT_B, _PROBIT_C, _PROBIT_D
    if p < _PROBIT_PLOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    if p > 1.0 - _PROBIT_PLOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
        ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    )


def _chi2_quantile(p: float, df: int) -> float:
    """Wilson-Hilferty cube approximation to the chi-square quantile."""
    z = _probit(p)
    t = 2.0 / (9.0 * df)
    return df * (1.0 - t + z * math.sqrt(t)) ** 3


def chi_square_test(
    observed, expected_probs, significance: float = 0.001
) -> tuple[float, int, bool]:
    """Goodness-of-fit statistic, degrees of freedom, and pass flag.

    Bins whose expected count falls below 5 are pooled into one bin before
    testing (the standard applicability rule).  The test passes iff the
    statistic does not exceed the (1 - significance) quantile at
    (bins - 1) degrees of freedom.
    """
    obs = np.asarray(observed, dtype=np.float64)
    probs = np.asarray(expected_probs, dtype=np.float64)
    if obs.shape != probs.shape or obs.ndim != 1:
        raise ValueError("observed and expected_probs must be 1-d and equal length")
    if not 0.0 < significance < 1.0:
        raise ValueError("significance must lie in (0, 1)")
    if abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("expected probabilities must sum to 1 within 1e-12")
    total = obs.sum()
    exp = probs * total
    small = exp < 5.0
    stat_bins = int(np.count_nonzero(~small))
    bins = stat_bins + (1 if small.any() else 0)
    if bins < 2:
        raise DegenerateBins("fewer than 2 bins after pooling")
    keep_obs = obs[~small]
    keep_exp = exp[~small]
    stat = float(np.sum((keep_obs - keep_exp) ** 2 / keep_exp))
    if small.any():
        po = float(obs[small].sum())
        pe = float(exp[small].sum())
        if pe > 0.0:
            stat += (po - pe) ** 2 / pe
        elif po > 0.0:
            stat = math.inf
    df = bins - 1
    crit = _chi2_quantile(1.0 - significance, df)
    return stat, df, stat <= crit
