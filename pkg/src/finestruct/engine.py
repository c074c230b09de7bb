"""Per-feature analysis pipeline and plot-model assembly.

Each feature is independently subsampled, transformed, routed to a glyph
(density, jittered scatter, or Dirac line) and tested; the resulting glyphs
are ordered and share one y axis. Per-feature seeds derive from the global
seed and the feature name, so adding a column never perturbs the others.
"""
from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass, field

import numpy as np

from .density import DensityCurve, PdeConfig, pde_estimate
from .errors import DegenerateSpread, EmptyFeature, FineStructError, NoPlottableFeatures
from .stats_core import (
    DescriptiveStats,
    FeatureSeries,
    ScalingMode,
    describe,
    quantile,
    robust_gaussian_fit,
    transform,
)
from .stattests import TestReport, gaussian_gate

JITTER_HALF_WIDTH = 0.3  # jitter offsets live in [-0.3, 0.3] column widths

# substream tags; larger than any plausible MC replicate index so the
# (seed, b) replicate streams can never collide with these
_TAG_SUBSAMPLE = 2**33 + 1
_TAG_PDE = 2**33 + 2
_TAG_JITTER = 2**33 + 3


class Ordering(enum.Enum):
    DEFAULT = "default"
    COLUMNWISE = "columnwise"
    ALPHABETICAL = "alphabetical"
    STATISTICS = "statistics"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Ordering":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown ordering {text!r} (expected one of: {valid})") from None


@dataclass(frozen=True)
class EngineConfig:
    sample_size_cap: int = 500_000  # total cell budget across all features
    min_data: int = 50
    min_unique: int = 12
    alpha: float = 0.05
    scaling: ScalingMode = ScalingMode.NONE
    ordering: Ordering = Ordering.DEFAULT
    robust_gaussian: bool = True
    boxplot_overlay: bool = False
    replicates: int = 2000
    seed: int = 0
    pde: PdeConfig = field(default_factory=PdeConfig)

    def __post_init__(self):
        if self.min_data < 2:
            raise ValueError("min_data must be at least 2")
        if self.min_unique < 1:
            raise ValueError("min_unique must be at least 1")
        if self.sample_size_cap < self.min_data:
            raise ValueError("sample_size_cap must be at least min_data")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")


@dataclass(frozen=True)
class GaussianOverlay:
    mu: float
    sigma: float
    curve: np.ndarray  # normal pdf sampled on the glyph's kernels


@dataclass(frozen=True)
class BoxOverlay:
    q25: float
    median: float
    q75: float
    whisker_low: float
    whisker_high: float


@dataclass(frozen=True)
class GlyphModel:
    """Visual form of one feature.

    kind is one of "density" (mirrored PDE curve), "jitter" (1D scatter with
    deterministic horizontal offsets) or "dirac" (a single horizontal line).
    """

    feature: str
    kind: str
    curve: DensityCurve | None = None
    points: np.ndarray | None = None          # jitter values
    offsets: np.ndarray | None = None         # jitter offsets in [-0.3, 0.3]
    dirac_value: float | None = None
    gaussian_overlay: GaussianOverlay | None = None
    box_overlay: BoxOverlay | None = None
    report: TestReport | None = None

    def extent(self) -> tuple[float, float]:
        if self.kind == "density":
            return float(self.curve.kernels[0]), float(self.curve.kernels[-1])
        if self.kind == "jitter":
            return float(self.points.min()), float(self.points.max())
        return self.dirac_value, self.dirac_value


@dataclass(frozen=True)
class FeatureAnalysis:
    feature: str
    stats: DescriptiveStats
    report: TestReport | None
    shape_class: str  # Nonunimodal | Skewed | GaussianLike | Discrete
    radius: float | None


@dataclass(frozen=True)
class SkipDiagnostic:
    feature: str
    reason: str


@dataclass(frozen=True)
class PlotModel:
    """Ordered glyphs plus shared-axis metadata; the renderer's sole input."""

    glyphs: tuple
    analyses: tuple
    skipped: tuple
    y_range: tuple[float, float]
    scaling_applied: ScalingMode
    title: str = ""

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "title": self.title,
            "scaling": str(self.scaling_applied),
            "y_range": list(self.y_range),
            "features": [
                {
                    "name": a.feature,
                    "glyph": g.kind,
                    "shape_class": a.shape_class,
                    "radius": a.radius,
                    "gaussian_overlay": g.gaussian_overlay is not None,
                    "stats": a.stats.to_dict(),
                    "test": a.report.to_dict() if a.report is not None else None,
                }
                for g, a in zip(self.glyphs, self.analyses)
            ],
            "skipped": [{"name": s.feature, "reason": s.reason} for s in self.skipped],
        }


def derive_seed(seed: int, name: str) -> int:
    """Per-feature substream: global seed XOR a stable hash of the name."""
    return (int(seed) ^ zlib.crc32(name.encode("utf-8"))) & 0xFFFFFFFF


def _substream(feature_seed: int, tag: int) -> int:
    return int(np.random.SeedSequence((feature_seed, tag)).generate_state(1)[0])


def subsample(f: FeatureSeries, cap_per_feature: int, seed: int = 0) -> FeatureSeries:
    """Seeded uniform sample without replacement down to the cap."""
    if cap_per_feature < 1:
        raise ValueError("cap_per_feature must be at least 1")
    if len(f) <= cap_per_feature:
        return f
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    idx = rng.choice(len(f), size=cap_per_feature, replace=False)
    idx.sort()
    return f.with_values(f.values[idx])


def _van_der_corput(start: int, count: int) -> np.ndarray:
    """Base-2 radical-inverse sequence; low-discrepancy in (0, 1)."""
    out = np.empty(count)
    for i in range(count):
        k = start + i
        v = 0.0
        denom = 1.0
        while k:
            denom *= 2.0
            v += (k & 1) / denom
            k >>= 1
        out[i] = v
    return out


def _jitter_offsets(n: int, seed: int) -> np.ndarray:
    start = int(np.random.SeedSequence((seed, _TAG_JITTER)).generate_state(1)[0] % 997) + 1
    return (_van_der_corput(start, n) - 0.5) * (2.0 * JITTER_HALF_WIDTH)


def _box_overlay(values: np.ndarray) -> BoxOverlay:
    s = np.sort(values)
    q25 = quantile(s, 0.25)
    q75 = quantile(s, 0.75)
    step = 1.5 * (q75 - q25)
    lo = float(s[np.searchsorted(s, q25 - step, side="left")])
    hi = float(s[np.searchsorted(s, q75 + step, side="right") - 1])
    return BoxOverlay(q25, quantile(s, 0.5), q75, lo, hi)


def _shape_class(report: TestReport | None, alpha: float) -> str:
    if report is None:
        return "GaussianLike"
    if report.dip_p < alpha:
        return "Nonunimodal"
    if report.skew_p < alpha:
        return "Skewed"
    return "GaussianLike"


def analyze_feature(f: FeatureSeries, cfg: EngineConfig) -> tuple[GlyphModel, FeatureAnalysis]:
    """Route one (already subsampled and transformed) feature to its glyph.

    Features below the data or uniqueness thresholds get a jittered scatter
    (a Dirac line when only one unique value exists); everything else gets a
    density glyph with tests, and optionally the Gaussian and box overlays.
    """
    if len(f) == 0:
        raise EmptyFeature(f"feature {f.name!r} has no values")
    stats = describe(f)
    n_unique = int(np.unique(f.values).size)
    feature_seed = derive_seed(cfg.seed, f.name)

    if len(f) < cfg.min_data or n_unique < cfg.min_unique:
        if n_unique == 1:
            glyph = GlyphModel(f.name, "dirac", dirac_value=float(f.values[0]))
        else:
            glyph = GlyphModel(
                f.name,
                "jitter",
                points=f.values.copy(),
                offsets=_jitter_offsets(len(f), feature_seed),
            )
        analysis = FeatureAnalysis(f.name, stats, None, "Discrete", None)
        return glyph, analysis

    curve = pde_estimate(f.values, cfg.pde, _substream(feature_seed, _TAG_PDE))
    overlay_ok, report = gaussian_gate(f, cfg.alpha, cfg.replicates, feature_seed)
    overlay = None
    if cfg.robust_gaussian and overlay_ok:
        try:
            mu, sigma = robust_gaussian_fit(f)
        except DegenerateSpread:
            pass
        else:
            pdf = np.exp(-0.5 * ((curve.kernels - mu) / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
            overlay = GaussianOverlay(mu, sigma, pdf)
    box = _box_overlay(f.values) if cfg.boxplot_overlay else None
    glyph = GlyphModel(
        f.name,
        "density",
        curve=curve,
        gaussian_overlay=overlay,
        box_overlay=box,
        report=report,
    )
    analysis = FeatureAnalysis(f.name, stats, report, _shape_class(report, cfg.alpha), curve.radius)
    return glyph, analysis


def order_features(analyses, mode: Ordering) -> list[int]:
    """Permutation of feature indices for the configured ordering.

    Statistics (the default) puts Gaussian-like features first: sort by dip
    p-value descending, then |skew z| ascending, then name; discrete glyphs
    go last.
    """
    if not analyses:
        raise NoPlottableFeatures("nothing to order")
    idx = list(range(len(analyses)))
    if mode is Ordering.COLUMNWISE:
        return idx
    if mode is Ordering.ALPHABETICAL:
        return sorted(idx, key=lambda i: analyses[i].feature)

    def key(i):
        a = analyses[i]
        if a.shape_class == "Discrete" or a.report is None:
            return (1, 0.0, 0.0, a.feature)
        return (0, -a.report.dip_p, abs(a.report.skew_z), a.feature)

    return sorted(idx, key=key)


def build_plot_model(features, cfg: EngineConfig) -> PlotModel:
    """Full pipeline: subsample, transform, analyze, order, share one axis.

    A failing feature is recorded as a skip diagnostic and never aborts the
    batch; if every feature fails, NoPlottableFeatures is raised.
    """
    features = list(features)
    if not features:
        raise NoPlottableFeatures("no input features")
    cap = max(cfg.min_data, cfg.sample_size_cap // len(features))

    glyphs: list[GlyphModel] = []
    analyses: list[FeatureAnalysis] = []
    skipped: list[SkipDiagnostic] = []
    for f in features:
        try:
            g = subsample(f, cap, _substream(derive_seed(cfg.seed, f.name), _TAG_SUBSAMPLE))
            g = transform(g, cfg.scaling)
            glyph, analysis = analyze_feature(g, cfg)
        except FineStructError as exc:
            skipped.append(SkipDiagnostic(f.name, f"{type(exc).__name__}: {exc}"))
            continue
        glyphs.append(glyph)
        analyses.append(analysis)
    if not glyphs:
        raise NoPlottableFeatures("all features were skipped")

    perm = order_features(analyses, cfg.ordering)
    glyphs = [glyphs[i] for i in perm]
    analyses = [analyses[i] for i in perm]

    lo = min(g.extent()[0] for g in glyphs)
    hi = max(g.extent()[1] for g in glyphs)
    span = hi - lo
    pad = 0.01 * span if span > 0 else 0.5
    return PlotModel(
        glyphs=tuple(glyphs),
        analyses=tuple(analyses),
        skipped=tuple(skipped),
        y_range=(lo - pad, hi + pad),
        scaling_applied=cfg.scaling,
    )
