"""SVG instance-space plots and the canonical machine-readable report.

Rendering is a pure function of (data, spec): identical inputs give
byte-identical output. report.json uses sorted keys and floats rounded to
6 significant digits so runs are diffable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .footprint import ConvexPolygon, Footprint
from .model import Coordinates2D, Outcome

GOOD_COLOR = "#0072B2"
BAD_COLOR = "#D55E00"

# 11-entry colorblind-aware cycle for discrete categories.
PALETTES = {
    "default": (
        "#332288",
        "#88CCEE",
        "#44AA99",
        "#117733",
        "#999933",
        "#DDCC77",
        "#CC6677",
        "#882255",
        "#AA4499",
        "#BBBBBB",
        "#EE7733",
    ),
}


class EmptyInput(Exception):
    pass


class ReportInvariantError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    width: int = 640
    height: int = 480
    margin: int = 48
    point_radius: float = 3.0
    palette: str = "default"
    x_label: str = "z1"
    y_label: str = "z2"

    def __post_init__(self) -> None:
        if self.width <= 2 * self.margin or self.height <= 2 * self.margin:
            raise ValueError("width and height must exceed twice the margin")
        if self.palette not in PALETTES:
            raise ValueError(f"unknown palette {self.palette!r}")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _AxisMap:
    """Affine, order-preserving map from data coordinates to pixels,
    with 5% padding on each side of the data range."""

    def __init__(self, coords: np.ndarray, spec: PlotSpec):
        xs = coords[:, 0]
        ys = coords[:, 1]
        self.spec = spec
        self.x0, self.x1 = self._padded(float(xs.min()), float(xs.max()))
        self.y0, self.y1 = self._padded(float(ys.min()), float(ys.max()))

    @staticmethod
    def _padded(lo: float, hi: float) -> tuple[float, float]:
        span = hi - lo
        pad = 0.05 * span if span > 0.0 else 0.5
        return lo - pad, hi + pad

    def x(self, v: float) -> float:
        s = self.spec
        return s.margin + (v - self.x0) / (self.x1 - self.x0) * (s.width - 2 * s.margin)

    def y(self, v: float) -> float:
        s = self.spec
        return s.height - s.margin - (v - self.y0) / (self.y1 - self.y0) * (
            s.height - 2 * s.margin
        )

    def point(self, p: Sequence[float]) -> tuple[float, float]:
        return self.x(float(p[0])), self.y(float(p[1]))


def gradient_color(t: float) -> str:
    """Blue-to-yellow linear interpolation, endpoints at t=0 and t=1."""
    t = min(max(float(t), 0.0), 1.0)
    r = 100.0 * t
    g = 100.0 * t
    b = 100.0 * (1.0 - t)
    return f"rgb({r:.4f}%,{g:.4f}%,{b:.4f}%)"


def _svg_open(spec: PlotSpec) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="#ffffff"/>',
    ]


def _axes(axis: _AxisMap, spec: PlotSpec) -> list[str]:
    m = spec.margin
    w, h = spec.width, spec.height
    return [
        f'<line x1="{m}" y1="{h - m}" x2="{w - m}" y2="{h - m}" stroke="#333333" stroke-width="1"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{h - m}" stroke="#333333" stroke-width="1"/>',
        f'<text x="{w - m}" y="{h - m + 28}" font-size="12" text-anchor="end">{spec.x_label}</text>',
        f'<text x="{m - 28}" y="{m}" font-size="12" text-anchor="start">{spec.y_label}</text>',
    ]


def _polygon_element(
    poly: ConvexPolygon, axis: _AxisMap, stroke: str, fill: str, extra: str = ""
) -> str:
    points = " ".join(
        f"{_fmt(px)},{_fmt(py)}" for px, py in (axis.point(v) for v in poly.vertices)
    )
    return f'<polygon points="{points}" stroke="{stroke}" fill="{fill}"{extra}/>'


def _legend_entry(x: float, y: float, color: str, label: str) -> list[str]:
    return [
        f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="10" height="10" fill="{color}"/>',
        f'<text x="{_fmt(x + 14)}" y="{_fmt(y + 9)}" font-size="11">{label}</text>',
    ]


def render_footprint_svg(
    coords: Coordinates2D,
    labels: Sequence[Outcome],
    footprint: Footprint,
    spec: PlotSpec = PlotSpec(),
) -> str:
    """One algorithm's instance space: labeled points, its GOOD hull, and the
    contradicted region. MISSING instances are not drawn."""
    pts = np.asarray(coords, dtype=float)
    if pts.size == 0:
        raise EmptyInput("no coordinates")
    if pts.shape[0] != len(labels):
        raise ValueError("coords and labels must align")

    axis = _AxisMap(pts, spec)
    parts = _svg_open(spec)
    parts.append(f"<title>{footprint.algorithm}</title>")
    parts.extend(_axes(axis, spec))

    if not footprint.good_hull.is_degenerate:
        parts.append(
            _polygon_element(
                footprint.good_hull, axis, GOOD_COLOR, "none", ' stroke-width="1.5"'
            )
        )
    if not footprint.contradiction.is_degenerate:
        parts.append(
            _polygon_element(
                footprint.contradiction,
                axis,
                BAD_COLOR,
                BAD_COLOR,
                ' fill-opacity="0.15" stroke-dasharray="4 3"',
            )
        )

    for p, outcome in zip(pts, labels):
        if outcome is Outcome.MISSING:
            continue
        color = GOOD_COLOR if outcome is Outcome.GOOD else BAD_COLOR
        px, py = axis.point(p)
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{spec.point_radius}" fill="{color}"/>'
        )

    lx = spec.width - spec.margin - 90
    parts.extend(_legend_entry(lx, spec.margin, GOOD_COLOR, "GOOD"))
    parts.extend(_legend_entry(lx, spec.margin + 16, BAD_COLOR, "BAD"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_feature_svg(
    coords: Coordinates2D,
    values: Sequence[float],
    spec: PlotSpec = PlotSpec(),
    name: str = "feature",
    vmin: float = 0.0,
    vmax: float = 1.0,
) -> str:
    """Feature gradient over the instance space: values must be min-max
    normalized to [0, 1]; low is blue, high is yellow. The color bar carries
    ``vmin``/``vmax`` tick labels."""
    pts = np.asarray(coords, dtype=float)
    vals = np.asarray(values, dtype=float)
    if pts.size == 0:
        raise EmptyInput("no coordinates")
    if pts.shape[0] != vals.shape[0]:
        raise ValueError("coords and values must align")

    axis = _AxisMap(pts, spec)
    parts = _svg_open(spec)
    parts.append(f"<title>{name}</title>")
    parts.extend(_axes(axis, spec))

    for p, t in zip(pts, vals):
        px, py = axis.point(p)
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{spec.point_radius}" '
            f'fill="{gradient_color(float(t))}"/>'
        )

    # Color bar: stacked slices from high (top) to low (bottom).
    bar_x = spec.width - spec.margin + 8
    bar_top = spec.margin
    bar_h = spec.height - 2 * spec.margin
    slices = 32
    for i in range(slices):
        t_hi = 1.0 - i / slices
        y = bar_top + i * bar_h / slices
        parts.append(
            f'<rect x="{bar_x}" y="{_fmt(y)}" width="10" height="{_fmt(bar_h / slices + 0.5)}" '
            f'fill="{gradient_color(t_hi - 0.5 / slices)}"/>'
        )
    parts.append(
        f'<text x="{bar_x + 14}" y="{bar_top + 9}" font-size="10">{_fmt(vmax)}</text>'
    )
    parts.append(
        f'<text x="{bar_x + 14}" y="{bar_top + bar_h}" font-size="10">{_fmt(vmin)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_dataset_svg(
    coords: Coordinates2D, tags: Sequence[str], spec: PlotSpec = PlotSpec()
) -> str:
    """Instance space colored by benchmark dataset, legend sorted by tag."""
    pts = np.asarray(coords, dtype=float)
    if pts.size == 0 or not tags:
        raise EmptyInput("no coordinates")
    if pts.shape[0] != len(tags):
        raise ValueError("coords and tags must align")

    palette = PALETTES[spec.palette]
    unique = sorted(set(tags))
    color_of = {tag: palette[i % len(palette)] for i, tag in enumerate(unique)}

    axis = _AxisMap(pts, spec)
    parts = _svg_open(spec)
    parts.append("<title>datasets</title>")
    parts.extend(_axes(axis, spec))
    for p, tag in zip(pts, tags):
        px, py = axis.point(p)
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{spec.point_radius}" '
            f'fill="{color_of[tag]}"/>'
        )
    lx = spec.width - spec.margin - 110
    for i, tag in enumerate(unique):
        parts.extend(_legend_entry(lx, spec.margin + 16 * i, color_of[tag], tag))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class AnalysisReport:
    """Everything one pipeline run produced, in plain-JSON form."""

    provenance: dict
    selected_features: tuple[str, ...]
    loadings: tuple[tuple[float, float], ...]
    eigenvalues: tuple[float, ...]
    explained_variance_2d: float
    explained_variance_ratios: tuple[float, ...]
    selection: dict
    algorithm_names: tuple[str, ...]
    footprints: Mapping[str, dict]
    overlap: tuple[tuple[float, ...], ...]
    selector: dict
    instances: dict

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "features": {
                "selected": list(self.selected_features),
                "loadings": [list(pair) for pair in self.loadings],
                "eigenvalues": list(self.eigenvalues),
                "explained_variance_2d": self.explained_variance_2d,
                "explained_variance_ratios": list(self.explained_variance_ratios),
            },
            "selection": self.selection,
            "algorithms": list(self.algorithm_names),
            "footprints": {k: dict(v) for k, v in self.footprints.items()},
            "overlap": [list(row) for row in self.overlap],
            "selector": self.selector,
            "instances": self.instances,
        }


def _check_report(report: AnalysisReport) -> None:
    algos = set(report.algorithm_names)
    if len(report.algorithm_names) != len(algos):
        raise ReportInvariantError("duplicate algorithm names")
    if set(report.footprints) != algos:
        raise ReportInvariantError(
            f"footprints cover {sorted(report.footprints)}, expected {sorted(algos)}"
        )
    for block in ("cv", "training"):
        covered = set(report.selector.get(block, {}).get("per_algorithm", {}))
        if covered != algos:
            raise ReportInvariantError(
                f"selector.{block} covers {sorted(covered)}, expected {sorted(algos)}"
            )
    n = len(report.algorithm_names)
    if len(report.overlap) != n or any(len(row) != n for row in report.overlap):
        raise ReportInvariantError("overlap matrix shape mismatch")


def _canonical(value):
    """Round floats to 6 significant digits, recursively; reject non-finite."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise ReportInvariantError("non-finite number in report")
        return float(f"{v:.6g}")
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_canonical(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(data: dict) -> str:
    return json.dumps(_canonical(data), sort_keys=True, indent=2) + "\n"


def write_report(report: AnalysisReport, path: Path) -> None:
    """Write the canonical report; refuses reports that break invariants."""
    _check_report(report)
    try:
        path.write_text(canonical_json(report.to_dict()), encoding="utf-8")
    except OSError as exc:
        raise IOError(f"cannot write report to {path}: {exc}") from exc


def read_report(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))
