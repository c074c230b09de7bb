"""Seeded synthetic samplers for benchmark experiments.

All samplers are deterministic functions of (parameters, seed); the RNG is
numpy's PCG64, constructed per call, never ambient state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadRange, BadSpec
from .stats_core import FeatureSeries

_HALF_NORMAL_MEAN = math.sqrt(2.0 / math.pi)  # E|Z| for Z ~ N(0,1)


@dataclass(frozen=True)
class GaussMixSpec:
    """Mixture components as (weight, mean, sd) triples; weights sum to 1."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), float(m), float(s)) for w, m, s in self.components)
        if not comps:
            raise BadSpec("mixture needs at least one component")
        if abs(sum(w for w, _, _ in comps) - 1.0) > 1e-12:
            raise BadSpec("mixture weights must sum to 1")
        if any(w < 0 for w, _, _ in comps):
            raise BadSpec("mixture weights must be non-negative")
        if any(s <= 0 for _, _, s in comps):
            raise BadSpec("component sd must be positive")
        object.__setattr__(self, "components", comps)


@dataclass(frozen=True)
class SkewSpec:
    """Skew parameter xi > 0; xi = 1 is the standard normal.

    With standardized=True the output is shifted/scaled to mean 0, variance 1
    so xi is the only moving part.
    """

    xi: float
    standardized: bool = True

    def __post_init__(self):
        if not self.xi > 0:
            raise BadSpec("xi must be positive")


def skew_normal_moments(xi: float) -> tuple[float, float]:
    """Analytic (mean, sd) of the unit-scale two-piece skew normal."""
    mean = _HALF_NORMAL_MEAN * (xi - 1.0 / xi)
    second = xi * xi - 1.0 + 1.0 / (xi * xi)
    var = second - mean * mean
    return mean, math.sqrt(var)


def sample_uniform(n: int, low: float, high: float, seed: int = 0) -> FeatureSeries:
    """n i.i.d. uniforms on [low, high)."""
    if n < 1:
        raise BadSpec("n must be at least 1")
    if low >= high:
        raise BadRange(f"need low < high, got [{low}, {high}]")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return FeatureSeries("uniform", rng.uniform(low, high, n))


def sample_gauss_mixture(n: int, spec: GaussMixSpec, seed: int = 0) -> FeatureSeries:
    """Gaussian mixture draw: pick a component by weight, then sample it."""
    if n < 1:
        raise BadSpec("n must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    w = np.array([c[0] for c in spec.components])
    means = np.array([c[1] for c in spec.components])
    sds = np.array([c[2] for c in spec.components])
    comp = rng.choice(w.size, size=n, p=w)
    values = rng.normal(means[comp], sds[comp])
    return FeatureSeries("gaussmix", values)


def sample_skew_normal(n: int, spec: SkewSpec, seed: int = 0) -> FeatureSeries:
    """Two-piece (inverse-scale-factor) skew normal draw.

    Draws a half-normal magnitude |Z|, then emits +|Z|*xi with probability
    xi^2/(1+xi^2) and -|Z|/xi otherwise. xi and 1/xi give mirror-image laws.
    """
    if n < 1:
        raise BadSpec("n must be at least 1")
    xi = spec.xi
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    mag = np.abs(rng.normal(size=n))
    pos = rng.random(n) < xi * xi / (1.0 + xi * xi)
    values = np.where(pos, mag * xi, -mag / xi)
    if spec.standardized:
        mean, sd = skew_normal_moments(xi)
        values = (values - mean) / sd
    return FeatureSeries("skewnorm", values)
