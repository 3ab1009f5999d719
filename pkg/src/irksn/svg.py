"""Minimal SVG line plots: axes, ticks, legend, translucent bands.

Figures are views of data that is also written to CSV, so only what the
plots need is supported.
"""

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .exceptions import ParameterError

__all__ = ["FigureKind", "FigureSpec", "render_svg", "write_svg"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 70, "right": 150, "top": 30, "bottom": 50}
LOG_FLOOR = 1e-16


class FigureKind(str, enum.Enum):
    PATH = "path"
    ERROR_VS_ITER = "error_vs_iter"
    SPARSITY_VS_ITER = "sparsity_vs_iter"
    F1_VS_PARAM = "f1_vs_param"


@dataclass
class FigureSpec:
    """``series`` maps a label to ``(x, y)``; ``bands`` to ``(lower, upper)``."""

    kind: FigureKind
    series: dict
    xlabel: str
    ylabel: str
    filename: str
    title: str = ""
    bands: dict = field(default_factory=dict)
    log_x: bool = False
    log_y: bool = False

    def __post_init__(self):
        self.kind = FigureKind(self.kind)
        if not self.series:
            raise ParameterError("a figure needs at least one series")
        clean = {}
        for name, (x, y) in self.series.items():
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            if x.ndim != 1 or x.shape != y.shape or x.size == 0:
                raise ParameterError(f"series {name!r}: x and y must be equal-length 1-D")
            if np.any(np.diff(x) <= 0):
                raise ParameterError(f"series {name!r}: x must be strictly increasing")
            clean[name] = (x, y)
        self.series = clean
        for name, (lo, hi) in self.bands.items():
            if name not in self.series:
                raise ParameterError(f"band {name!r} has no matching series")
            if np.shape(lo) != self.series[name][0].shape or np.shape(hi) != np.shape(lo):
                raise ParameterError(f"band {name!r} does not match its series")


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    return [first + i * step for i in range(int((hi - first) / step + 1e-9) + 1)]


def _fmt_tick(v, log):
    if log:
        return f"1e{int(round(v))}"
    return f"{v:.4g}"


def _range(arrays):
    lo = min(float(np.min(a)) for a in arrays)
    hi = max(float(np.max(a)) for a in arrays)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def render_svg(fig):
    """Return the SVG document for ``fig`` as a string."""
    tx = (lambda v: np.log10(np.maximum(v, LOG_FLOOR))) if fig.log_x else (lambda v: v)
    ty = (lambda v: np.log10(np.maximum(v, LOG_FLOOR))) if fig.log_y else (lambda v: v)
    xs = [tx(x) for x, _ in fig.series.values()]
    ys = [ty(y) for _, y in fig.series.values()]
    ys += [ty(np.asarray(b, dtype=float)) for band in fig.bands.values() for b in band]
    finite_y = [y[np.isfinite(y)] for y in ys if np.any(np.isfinite(y))] or [np.zeros(1)]
    x0, x1 = _range(xs)
    y0, y1 = _range(finite_y)
    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    if fig.title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="18" text-anchor="middle" '
                   f'font-size="13">{escape(fig.title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" '
               f'stroke="black"/>')
    for v in _ticks(x0, x1):
        out.append(f'<line x1="{px(v):.1f}" y1="{top + ph}" x2="{px(v):.1f}" '
                   f'y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{px(v):.1f}" y="{top + ph + 16}" text-anchor="middle">'
                   f'{_fmt_tick(v, fig.log_x)}</text>')
    for v in _ticks(y0, y1):
        out.append(f'<line x1="{left - 4}" y1="{py(v):.1f}" x2="{left}" y2="{py(v):.1f}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{py(v) + 4:.1f}" text-anchor="end">'
                   f'{_fmt_tick(v, fig.log_y)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">'
               f'{escape(fig.xlabel)}</text>')
    out.append(f'<text transform="translate(16,{top + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(fig.ylabel)}</text>')

    for i, (name, (x, y)) in enumerate(fig.series.items()):
        color = PALETTE[i % len(PALETTE)]
        if name in fig.bands:
            lo, hi = (ty(np.asarray(b, dtype=float)) for b in fig.bands[name])
            pts = [(px(a), py(b)) for a, b in zip(tx(x), hi)]
            pts += [(px(a), py(b)) for a, b in zip(tx(x)[::-1], lo[::-1])]
            out.append('<polygon points="' + " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
                       + f'" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        ok = np.isfinite(ty(y))
        pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(tx(x)[ok], ty(y)[ok]))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        ly = top + 12 + 16 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(fig, directory="."):
    path = Path(directory) / fig.filename
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(fig), encoding="utf-8")
    return path
