"""Descriptive statistics, quantiles, robust estimators and feature transforms.

Everything here is a pure function of its inputs. The quantile definition is
pinned to linear interpolation with index h = (n-1)*p so that results are
bit-reproducible across this package.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstantFeature, DegenerateSpread, EmptyFeature

# normal-consistent IQR-to-sigma calibration: IQR of N(0,1) is ~1.349
IQR_TO_SIGMA = 1.349


@dataclass(frozen=True)
class FeatureSeries:
    """One named numeric feature with missing-value accounting.

    ``values`` holds only finite reals; entries dropped at ingestion are
    counted in ``missing_count``.
    """

    name: str
    values: np.ndarray
    missing_count: int = 0

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).ravel()
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError(f"feature {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", arr)
        if self.missing_count < 0:
            raise ValueError("missing_count must be non-negative")

    @classmethod
    def clean(cls, name: str, raw) -> "FeatureSeries":
        """Build a series from raw numbers, dropping NaN/inf into missing_count."""
        arr = np.asarray(raw, dtype=float).ravel()
        keep = np.isfinite(arr)
        return cls(name, arr[keep], missing_count=int(arr.size - keep.sum()))

    def __len__(self) -> int:
        return int(self.values.size)

    def with_values(self, values) -> "FeatureSeries":
        return FeatureSeries(self.name, values, self.missing_count)


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    missing: int
    q01: float
    q25: float
    median: float
    q75: float
    q99: float
    mean: float
    skewness_g1: float  # NaN marks "undefined" (constant feature)
    excess_kurtosis: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "missing": self.missing,
            "q01": self.q01,
            "q25": self.q25,
            "median": self.median,
            "q75": self.q75,
            "q99": self.q99,
            "mean": self.mean,
            "skewness_g1": self.skewness_g1,
            "excess_kurtosis": self.excess_kurtosis,
        }


class ScalingMode(enum.Enum):
    NONE = "none"
    PERCENTALIZE = "percentalize"
    ROBUST = "robust"
    COMPLETE_ROBUST = "completerobust"
    LOG = "log"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "ScalingMode":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown scaling mode {text!r} (expected one of: {valid})") from None


def quantile(values, p: float) -> float:
    """Linear-interpolation quantile of ascending-sorted ``values``.

    Uses index h = (n-1)*p; endpoints are the sample min/max.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise EmptyFeature("quantile of empty sample")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    h = (v.size - 1) * p
    lo = math.floor(h)
    if lo >= v.size - 1:
        return float(v[-1])
    frac = h - lo
    return float(v[lo] + frac * (v[lo + 1] - v[lo]))


def describe(f: FeatureSeries) -> DescriptiveStats:
    """Descriptive statistics of one feature.

    Moments are population central moments m_k = sum((x-mean)^k)/n;
    g1 = m3/m2^1.5, excess kurtosis = m4/m2^2 - 3. Both are NaN for a
    constant feature.
    """
    if f.values.size == 0:
        raise EmptyFeature(f"feature {f.name!r} has no values")
    # moments are computed on sorted values so the result is exactly
    # permutation-invariant (summation order is canonical)
    s = np.sort(f.values)
    mean = float(np.mean(s))
    d = s - mean
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        g1 = float("nan")
        kurt = float("nan")
    else:
        m3 = float(np.mean(d * d * d))
        m4 = float(np.mean(d * d * d * d))
        g1 = m3 / m2 ** 1.5
        kurt = m4 / (m2 * m2) - 3.0
    return DescriptiveStats(
        n=int(s.size),
        missing=f.missing_count,
        q01=quantile(s, 0.01),
        q25=quantile(s, 0.25),
        median=quantile(s, 0.5),
        q75=quantile(s, 0.75),
        q99=quantile(s, 0.99),
        mean=mean,
        skewness_g1=g1,
        excess_kurtosis=kurt,
    )


def symmetric_log(x: np.ndarray) -> np.ndarray:
    """sign(x) * log10(1 + |x|); odd, continuous, 0 maps to 0."""
    return np.sign(x) * np.log10(1.0 + np.abs(x))


def transform(f: FeatureSeries, mode: ScalingMode) -> FeatureSeries:
    """Rescale a feature so differently-ranged features share one axis.

    Percentalize maps [min, max] to [0, 100]; Robust maps the 1%/99%
    quantile window to [0, 1]; CompleteRobust additionally clamps to [0, 1];
    Log is the symmetric base-10 log.
    """
    x = f.values
    if x.size == 0:
        raise EmptyFeature(f"feature {f.name!r} has no values")
    if mode is ScalingMode.NONE:
        return f
    if mode is ScalingMode.LOG:
        return f.with_values(symmetric_log(x))
    if mode is ScalingMode.PERCENTALIZE:
        lo, hi = float(x.min()), float(x.max())
        if hi == lo:
            raise ConstantFeature(f"feature {f.name!r} is constant; cannot percentalize")
        return f.with_values((x - lo) / (hi - lo) * 100.0)
    # Robust / CompleteRobust
    s = np.sort(x)
    q01 = quantile(s, 0.01)
    q99 = quantile(s, 0.99)
    if q99 == q01:
        raise ConstantFeature(f"feature {f.name!r} has no spread between Q01 and Q99")
    y = (x - q01) / (q99 - q01)
    if mode is ScalingMode.COMPLETE_ROBUST:
        y = np.clip(y, 0.0, 1.0)
    return f.with_values(y)


def robust_gaussian_fit(f: FeatureSeries) -> tuple[float, float]:
    """Outlier-resistant normal fit: median and IQR-calibrated sigma."""
    x = f.values
    if x.size < 2:
        raise EmptyFeature(f"feature {f.name!r}: need at least 2 values")
    s = np.sort(x)
    mu = quantile(s, 0.5)
    iqr = quantile(s, 0.75) - quantile(s, 0.25)
    if iqr <= 0.0:
        raise DegenerateSpread(f"feature {f.name!r}: interquartile range is zero")
    return mu, iqr / IQR_TO_SIGMA
