"""Deterministic SVG rendering of a plot model.

One vertical column per feature: density glyphs are closed polygons mirrored
about the column axis (per-feature width-normalized so every glyph spans its
column), jitter glyphs are small circles, Dirac glyphs a horizontal line.
Output is plain SVG 1.1 text, byte-identical for identical inputs.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .engine import PlotModel
from .errors import NoPlottableFeatures

SVG_NS = "http://www.w3.org/2000/svg"

MARGIN_LEFT = 70.0
MARGIN_RIGHT = 20.0
MARGIN_TOP = 45.0
MARGIN_BOTTOM = 60.0


@dataclass(frozen=True)
class RenderConfig:
    width_px: int = 960
    height_px: int = 640
    column_width_fraction: float = 0.9
    glyph_fill: str = "#9aa0a6"
    gaussian_color: str = "magenta"
    box_color: str = "black"
    reference_line_color: str = "red"
    reference_lines: tuple = ()

    def __post_init__(self):
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("render dimensions must be positive")
        if not 0.0 < self.column_width_fraction <= 1.0:
            raise ValueError("column_width_fraction must be in (0, 1]")
        object.__setattr__(self, "reference_lines", tuple(float(v) for v in self.reference_lines))


@dataclass(frozen=True)
class AxisTransform:
    """Affine map between data-space y values and pixel rows."""

    y_low: float
    y_high: float
    px_top: float
    px_height: float

    def to_px(self, y: float) -> float:
        frac = (self.y_high - y) / (self.y_high - self.y_low)
        return self.px_top + frac * self.px_height

    def to_data(self, px: float) -> float:
        frac = (px - self.px_top) / self.px_height
        return self.y_high - frac * (self.y_high - self.y_low)


def nice_ticks(lo: float, hi: float) -> list[float]:
    """Round tick positions covering [lo, hi] with 1-2-5 stepping."""
    span = hi - lo
    if span <= 0:
        return [lo]
    mag = 10.0 ** math.floor(math.log10(span))
    best = None
    for scale in (mag * 10.0, mag, mag / 10.0, mag / 100.0):
        for mult in (1.0, 2.0, 5.0):
            step = scale * mult
            first = math.ceil(lo / step)
            last = math.floor(hi / step)
            count = last - first + 1
            if count < 4 or count > 14:
                continue
            score = abs(count - 8)
            if best is None or score < best[0] or (score == best[0] and step > best[1]):
                best = (score, step, first, count)
    if best is None:  # degenerate span; fall back to endpoints
        return [lo, hi]
    _, step, first, count = best
    return [(first + i) * step for i in range(count)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:g}"


def gaussian_overlay_path(mu: float, sigma: float, kernels, width_scale: float = 1.0) -> np.ndarray:
    """Normal pdf sampled on the glyph's kernels, scaled like the density.

    ``width_scale`` is the per-feature factor (half-width / max density) the
    renderer applies to the density itself, so the two outlines compare.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    k = np.asarray(kernels, dtype=float)
    pdf = np.exp(-0.5 * ((k - mu) / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
    return pdf * width_scale


def _polygon_points(xs, ys) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))


def render_svg(model: PlotModel, cfg: RenderConfig = RenderConfig()) -> str:
    """Render a plot model to an SVG 1.1 document."""
    if not model.glyphs:
        raise NoPlottableFeatures("plot model has no glyphs")
    w, h = float(cfg.width_px), float(cfg.height_px)
    plot_w = w - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = h - MARGIN_TOP - MARGIN_BOTTOM
    axis = AxisTransform(model.y_range[0], model.y_range[1], MARGIN_TOP, plot_h)
    k = len(model.glyphs)
    colw = plot_w / k
    half = colw * cfg.column_width_fraction / 2.0

    root = ET.Element("svg", {
        "xmlns": SVG_NS,
        "version": "1.1",
        "width": str(cfg.width_px),
        "height": str(cfg.height_px),
        "viewBox": f"0 0 {cfg.width_px} {cfg.height_px}",
    })
    ET.SubElement(root, "rect", {
        "x": "0", "y": "0", "width": str(cfg.width_px), "height": str(cfg.height_px),
        "fill": "white",
    })
    if model.title:
        title = ET.SubElement(root, "text", {
            "x": _fmt(w / 2.0), "y": _fmt(MARGIN_TOP * 0.6),
            "text-anchor": "middle", "font-family": "sans-serif", "font-size": "16",
        })
        title.text = model.title

    # y axis with ticks
    axis_g = ET.SubElement(root, "g", {"stroke": "black", "stroke-width": "1"})
    ET.SubElement(axis_g, "line", {
        "x1": _fmt(MARGIN_LEFT), "y1": _fmt(MARGIN_TOP),
        "x2": _fmt(MARGIN_LEFT), "y2": _fmt(MARGIN_TOP + plot_h),
    })
    for tick in nice_ticks(model.y_range[0], model.y_range[1]):
        py = axis.to_px(tick)
        ET.SubElement(axis_g, "line", {
            "x1": _fmt(MARGIN_LEFT - 5.0), "y1": _fmt(py),
            "x2": _fmt(MARGIN_LEFT), "y2": _fmt(py),
        })
        label = ET.SubElement(axis_g, "text", {
            "x": _fmt(MARGIN_LEFT - 8.0), "y": _fmt(py + 4.0),
            "text-anchor": "end", "font-family": "sans-serif", "font-size": "11",
            "stroke": "none", "fill": "black",
        })
        label.text = _tick_label(tick)

    for i, glyph in enumerate(model.glyphs):
        cx = MARGIN_LEFT + (i + 0.5) * colw
        g = ET.SubElement(root, "g")
        if glyph.kind == "density":
            curve = glyph.curve
            dmax = float(curve.densities.max())
            widths = curve.densities / dmax * half
            ys = [axis.to_px(v) for v in curve.kernels]
            xs = [cx - wd for wd in widths] + [cx + wd for wd in reversed(widths)]
            pys = ys + list(reversed(ys))
            ET.SubElement(g, "polygon", {
                "points": _polygon_points(xs, pys),
                "fill": cfg.glyph_fill,
                "stroke": "none",
            })
            if glyph.gaussian_overlay is not None:
                ov = glyph.gaussian_overlay
                ow = gaussian_overlay_path(ov.mu, ov.sigma, curve.kernels, half / dmax)
                for sign in (-1.0, 1.0):
                    pts = _polygon_points([cx + sign * wd for wd in ow], ys)
                    ET.SubElement(g, "polyline", {
                        "points": pts,
                        "fill": "none",
                        "stroke": cfg.gaussian_color,
                        "stroke-width": "1.5",
                    })
            if glyph.box_overlay is not None:
                _draw_box(g, glyph.box_overlay, cx, colw, axis, cfg.box_color)
        elif glyph.kind == "jitter":
            for value, off in zip(glyph.points, glyph.offsets):
                ET.SubElement(g, "circle", {
                    "cx": _fmt(cx + off * colw),
                    "cy": _fmt(axis.to_px(float(value))),
                    "r": "2",
                    "fill": cfg.glyph_fill,
                    "fill-opacity": "0.7",
                })
        else:  # dirac
            py = axis.to_px(glyph.dirac_value)
            ET.SubElement(g, "line", {
                "x1": _fmt(cx - half), "y1": _fmt(py),
                "x2": _fmt(cx + half), "y2": _fmt(py),
                "stroke": cfg.glyph_fill, "stroke-width": "2.5",
            })
        name = ET.SubElement(root, "text", {
            "x": _fmt(cx), "y": _fmt(MARGIN_TOP + plot_h + 18.0),
            "text-anchor": "middle", "font-family": "sans-serif", "font-size": "11",
        })
        name.text = glyph.feature

    for ref in cfg.reference_lines:
        ET.SubElement(root, "line", {
            "x1": _fmt(MARGIN_LEFT), "y1": _fmt(axis.to_px(ref)),
            "x2": _fmt(MARGIN_LEFT + plot_w), "y2": _fmt(axis.to_px(ref)),
            "stroke": cfg.reference_line_color, "stroke-width": "1",
        })

    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode")


def _draw_box(g, box, cx: float, colw: float, axis: AxisTransform, color: str) -> None:
    bw = 0.08 * colw
    y25 = axis.to_px(box.q25)
    y75 = axis.to_px(box.q75)
    ET.SubElement(g, "rect", {
        "x": _fmt(cx - bw), "y": _fmt(y75),
        "width": _fmt(2 * bw), "height": _fmt(y25 - y75),
        "fill": "none", "stroke": color, "stroke-width": "1.2",
    })
    ET.SubElement(g, "line", {
        "x1": _fmt(cx - bw), "y1": _fmt(axis.to_px(box.median)),
        "x2": _fmt(cx + bw), "y2": _fmt(axis.to_px(box.median)),
        "stroke": color, "stroke-width": "1.8",
    })
    for q, wv in ((box.q25, box.whisker_low), (box.q75, box.whisker_high)):
        ET.SubElement(g, "line", {
            "x1": _fmt(cx), "y1": _fmt(axis.to_px(q)),
            "x2": _fmt(cx), "y2": _fmt(axis.to_px(wv)),
            "stroke": color, "stroke-width": "1.2",
        })
        ET.SubElement(g, "line", {
            "x1": _fmt(cx - bw * 0.7), "y1": _fmt(axis.to_px(wv)),
            "x2": _fmt(cx + bw * 0.7), "y2": _fmt(axis.to_px(wv)),
            "stroke": color, "stroke-width": "1.2",
        })


def default_axis(model: PlotModel, cfg: RenderConfig = RenderConfig()) -> AxisTransform:
    """The axis transform render_svg uses for this model and config."""
    plot_h = float(cfg.height_px) - MARGIN_TOP - MARGIN_BOTTOM
    return AxisTransform(model.y_range[0], model.y_range[1], MARGIN_TOP, plot_h)
