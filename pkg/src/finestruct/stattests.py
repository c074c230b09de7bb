"""Unimodality and skewness testing.

The dip statistic is the minimum over all unimodal distribution functions of
the sup distance to the empirical CDF, computed exactly on sorted data with
the greatest-convex-minorant / least-concave-majorant iteration. Its p-value
comes from seeded Monte Carlo against the uniform null. Skewness uses the
classic transformation of g1 to an approximately standard-normal z.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstantFeature, TooFewPoints
from .stats_core import FeatureSeries

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class TestReport:
    """Dip and skewness results for one feature."""

    n: int
    dip_d: float
    dip_p: float
    dip_replicates: int
    skew_g1: float
    skew_z: float
    skew_p: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dip_d": self.dip_d,
            "dip_p": self.dip_p,
            "dip_replicates": self.dip_replicates,
            "skew_g1": self.skew_g1,
            "skew_z": self.skew_z,
            "skew_p": self.skew_p,
            "seed": self.seed,
        }


def _dip_sorted(x):
    """Dip of an ascending-sorted sample, in [1/(2n), 1/4].

    Iteratively fits the greatest convex minorant and least concave majorant
    of the ECDF on a shrinking modal interval; the running maximum discrepancy
    (kept in units of 2n) is the dip. Ties are handled natively.
    """
    n = x.shape[0]
    if x[n - 1] == x[0]:
        return 0.5 / n
    low = 0
    high = n - 1
    dip = 1.0  # in 2n units; enforces the 1/(2n) lower bound

    # mn[j]: start of the convex-minorant chord ending at j
    mn = np.empty(n, np.int64)
    mn[0] = 0
    for j in range(1, n):
        mn[j] = j - 1
        while True:
            mnj = mn[j]
            mnmnj = mn[mnj]
            if mnj == 0 or (x[j] - x[mnj]) * (mnj - mnmnj) < (x[mnj] - x[mnmnj]) * (j - mnj):
                break
            mn[j] = mnmnj
    # mj[k]: end of the concave-majorant chord starting at k
    mj = np.empty(n, np.int64)
    mj[n - 1] = n - 1
    for k in range(n - 2, -1, -1):
        mj[k] = k + 1
        while True:
            mjk = mj[k]
            mjmjk = mj[mjk]
            if mjk == n - 1 or (x[k] - x[mjk]) * (mjk - mjmjk) < (x[mjk] - x[mjmjk]) * (k - mjk):
                break
            mj[k] = mjmjk

    gcm = np.empty(n, np.int64)
    lcm = np.empty(n, np.int64)
    while True:
        gcm[0] = high
        i = 0
        while gcm[i] > low:
            gcm[i + 1] = mn[gcm[i]]
            i += 1
        ig = i
        l_gcm = i
        ix = ig - 1

        lcm[0] = low
        i = 0
        while lcm[i] < high:
            lcm[i + 1] = mj[lcm[i]]
            i += 1
        ih = i
        l_lcm = i
        iv = 1

        # largest distance between the two fits, walked from both ends
        d = 0.0
        if l_gcm != 1 or l_lcm != 1:
            while True:
                gcmix = gcm[ix]
                lcmiv = lcm[iv]
                if gcmix > lcmiv:
                    gcmil = gcm[ix + 1]
                    dx = (lcmiv - gcmil + 1) - (x[lcmiv] - x[gcmil]) * (gcmix - gcmil) / (x[gcmix] - x[gcmil])
                    iv += 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv - 1
                else:
                    lcmivl = lcm[iv - 1]
                    dx = (x[gcmix] - x[lcmivl]) * (lcmiv - lcmivl) / (x[lcmiv] - x[lcmivl]) - (gcmix - lcmivl - 1)
                    ix -= 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv
                if ix < 0:
                    ix = 0
                if iv > l_lcm:
                    iv = l_lcm
                if gcm[ix] == lcm[iv]:
                    break
        if d < dip:
            break

        # dip of the convex minorant within the current modal interval
        dip_l = 0.0
        for j in range(ig, l_gcm):
            max_t = 1.0
            jb = gcm[j + 1]
            je = gcm[j]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (jj - jb + 1) - (x[jj] - x[jb]) * c
                    if max_t < t:
                        max_t = t
            if dip_l < max_t:
                dip_l = max_t
        # dip of the concave majorant
        dip_u = 0.0
        for j in range(ih, l_lcm):
            max_t = 1.0
            jb = lcm[j]
            je = lcm[j + 1]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (x[jj] - x[jb]) * c - (jj - jb - 1)
                    if max_t < t:
                        max_t = t
            if dip_u < max_t:
                dip_u = max_t

        dip_new = dip_u if dip_u > dip_l else dip_l
        if dip < dip_new:
            dip = dip_new
        if low == gcm[ig] and high == lcm[ih]:
            break
        low = gcm[ig]
        high = lcm[ih]
    return dip / (2.0 * n)


_dip_sorted_py = _dip_sorted
try:  # JIT-compile the inner loop; the pure-Python path stays as fallback
    import numba

    _dip_sorted = numba.njit("float64(float64[::1])", cache=True)(_dip_sorted_py)
except ImportError:  # pragma: no cover
    pass


def dip_statistic(values) -> float:
    """Hartigan-Hartigan dip of a sample; larger means less unimodal."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size < 2:
        raise TooFewPoints("dip_statistic needs at least 2 values")
    return float(_dip_sorted(np.sort(x)))


@functools.lru_cache(maxsize=16)
def _null_dips(n: int, b: int, seed: int) -> np.ndarray:
    """Dips of B seeded uniform(0,1) samples of size n (the dip-test null)."""
    out = np.empty(b)
    for i in range(b):
        rng = np.random.default_rng(np.random.SeedSequence((seed, i)))
        u = rng.random(n)
        u.sort()
        out[i] = _dip_sorted(u)
    out.setflags(write=False)
    return out


def dip_pvalue_mc(d: float, n: int, B: int, seed: int = 0) -> float:
    """Monte Carlo p-value of a dip value against the uniform null.

    Add-one estimator p = (1 + #{dip(U_b) >= d}) / (B + 1); each replicate b
    draws from its own (seed, b) stream, so results are reproducible and
    monotone in d for a fixed seed.
    """
    if d <= 0:
        raise ValueError("d must be positive")
    if n < 2:
        raise TooFewPoints("dip p-value needs n >= 2")
    if B < 1:
        raise ValueError("B must be at least 1")
    null = _null_dips(int(n), int(B), int(seed) & _SEED_MASK)
    exceed = int(np.count_nonzero(null >= d))
    return (1 + exceed) / (B + 1)


def dagostino_skewness(values) -> tuple[float, float, float]:
    """Skewness test: returns (g1, z, two-sided p).

    g1 = m3/m2^1.5 is transformed to an approximately N(0,1) statistic via
    the Johnson S_U fit to its null distribution; needs n >= 9.
    """
    x = np.asarray(values, dtype=float).ravel()
    n = x.size
    if n < 9:
        raise TooFewPoints(f"skewness test needs n >= 9, got {n}")
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        raise ConstantFeature("skewness undefined for a constant sample")
    m3 = float(np.mean(d * d * d))
    g1 = m3 / m2 ** 1.5
    y = g1 * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    )
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(math.log(math.sqrt(w2)))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    z = delta * math.asinh(y / alpha)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return g1, z, p


def gaussian_gate(
    f: FeatureSeries, alpha: float = 0.05, B: int = 2000, seed: int = 0
) -> tuple[bool, TestReport | None]:
    """Decide whether a feature looks Gaussian enough for a normal overlay.

    The overlay is drawn only when both the dip test and the skewness test
    fail to reject at level ``alpha``. The report carries all statistics
    regardless of the outcome; on a degenerate feature the gate returns
    (False, None) instead of raising.
    """
    try:
        d = dip_statistic(f.values)
        dip_p = dip_pvalue_mc(d, len(f), B, seed)
        g1, z, skew_p = dagostino_skewness(f.values)
    except (ConstantFeature, TooFewPoints):
        return False, None
    report = TestReport(
        n=len(f),
        dip_d=d,
        dip_p=dip_p,
        dip_replicates=B,
        skew_g1=g1,
        skew_z=z,
        skew_p=skew_p,
        seed=seed,
    )
    return (dip_p >= alpha) and (skew_p >= alpha), report
