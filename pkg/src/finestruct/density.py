"""Pareto density estimation.

Density at a kernel position is the number of data points within a fixed
radius; the radius is a low quantile of the pairwise distances, so that a
neighborhood holds roughly 20% of the data. The resulting curve is defined
only on [min(data), max(data)] and never extends past the observed range.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstantFeature, TooFewPoints


@dataclass(frozen=True)
class PdeConfig:
    pareto_quantile: float = 0.18
    distance_sample_cap: int = 5000
    large_n_threshold: int = 1024
    grid_min: int = 64
    grid_max: int = 2048
    spacing_divisor: float = 4.0

    def __post_init__(self):
        if not 0.0 < self.pareto_quantile < 1.0:
            raise ValueError("pareto_quantile must be in (0, 1)")
        if self.grid_min > self.grid_max:
            raise ValueError("grid_min must not exceed grid_max")
        if min(self.distance_sample_cap, self.large_n_threshold, self.grid_min) < 1:
            raise ValueError("caps must be positive")
        if self.spacing_divisor <= 0:
            raise ValueError("spacing_divisor must be positive")


@dataclass(frozen=True)
class DensityCurve:
    """Kernel positions, densities and the radius used to count neighbors.

    Kernels span exactly [min(data), max(data)]; densities are normalized so
    the trapezoidal integral over the kernels is 1. Outside the kernel range
    the density is exactly 0 by contract.
    """

    kernels: np.ndarray
    densities: np.ndarray
    radius: float

    def __post_init__(self):
        k = np.asarray(self.kernels, dtype=float)
        d = np.asarray(self.densities, dtype=float)
        if k.size != d.size or k.size < 2:
            raise ValueError("kernels/densities must be equal-length, size >= 2")
        if np.any(np.diff(k) <= 0):
            raise ValueError("kernels must be strictly increasing")
        if np.any(d < 0):
            raise ValueError("densities must be non-negative")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "kernels", k)
        object.__setattr__(self, "densities", d)

    def integral(self) -> float:
        return _trapezoid(self.densities, self.kernels)


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(np.sum((y[1:] + y[:-1]) * 0.5 * np.diff(x)))


def _pairwise_diffs(sorted_values: np.ndarray) -> np.ndarray:
    """All n*(n-1)/2 non-negative pairwise differences of a sorted vector."""
    n = sorted_values.size
    out = np.empty(n * (n - 1) // 2)
    pos = 0
    for i in range(n - 1):
        m = n - 1 - i
        out[pos:pos + m] = sorted_values[i + 1:] - sorted_values[i]
        pos += m
    return out


def pareto_radius(values, cfg: PdeConfig = PdeConfig(), seed: int = 0) -> float:
    """Neighborhood radius: the ``pareto_quantile`` of pairwise distances.

    Above ``distance_sample_cap`` points the distances are taken on a seeded
    uniform subsample. A zero quantile (heavy ties) escalates to the smallest
    strictly positive distance. Above ``large_n_threshold`` the radius shrinks
    by (n/threshold)^(-1/5) so dense samples keep local detail.
    """
    x = np.asarray(values, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise TooFewPoints("pareto_radius needs at least 2 values")
    if np.all(x == x[0]):
        raise ConstantFeature("all values identical; no radius exists")
    if n > cfg.distance_sample_cap:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        idx = rng.choice(n, size=cfg.distance_sample_cap, replace=False)
        sample = np.sort(x[idx])
    else:
        sample = np.sort(x)
    d = _pairwise_diffs(sample)
    r = float(np.quantile(d, cfg.pareto_quantile))
    if r <= 0.0:
        pos = d[d > 0.0]
        if pos.size:
            r = float(pos.min())
        else:
            # subsample happened to be constant; fall back to the full data
            gaps = np.diff(np.unique(x))
            r = float(gaps.min())
    if n > cfg.large_n_threshold:
        r *= (n / cfg.large_n_threshold) ** (-0.2)
    return r


def pde_estimate(values, cfg: PdeConfig = PdeConfig(), seed: int = 0) -> DensityCurve:
    """Pareto density estimate on an even kernel grid spanning the data range.

    The kernel count is ceil(range / (radius/spacing_divisor)) + 1, clamped to
    [grid_min, grid_max]. Raw density at kernel g is |{x : |x - g| <= r}|,
    then the vector is normalized to unit trapezoidal integral.
    """
    x = np.asarray(values, dtype=float).ravel()
    r = pareto_radius(x, cfg, seed)
    lo = float(x.min())
    hi = float(x.max())
    m = int(np.ceil((hi - lo) / (r / cfg.spacing_divisor))) + 1
    m = min(max(m, cfg.grid_min), cfg.grid_max)
    kernels = np.linspace(lo, hi, m)
    xs = np.sort(x)
    counts = (
        np.searchsorted(xs, kernels + r, side="right")
        - np.searchsorted(xs, kernels - r, side="left")
    ).astype(float)
    densities = counts / _trapezoid(counts, kernels)
    return DensityCurve(kernels=kernels, densities=densities, radius=r)


def neighborhood_fraction(values, radius: float) -> float:
    """Mean fraction of the sample within ``radius`` of each point (self-inclusive)."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise TooFewPoints("neighborhood_fraction needs at least 1 value")
    xs = np.sort(x)
    counts = (
        np.searchsorted(xs, xs + radius, side="right")
        - np.searchsorted(xs, xs - radius, side="left")
    )
    return float(counts.mean() / x.size)
