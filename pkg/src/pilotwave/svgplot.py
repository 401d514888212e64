"""Minimal standalone SVG rendering: line plots and heatmaps.

The scenario runner emits vector figures without any plotting dependency;
only straight-line paths, rectangles, and text are used.  Layout is fixed
(margins in pixels) and data are autoscaled into the axes box.
"""
from __future__ import annotations

import numpy as np

# canvas defaults (pixels)
WIDTH = 720
HEIGHT = 480
MARGIN_L = 72
MARGIN_R = 24
MARGIN_T = 40
MARGIN_B = 56

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _nice_ticks(lo: float, hi: float, n: int = 6) -> np.ndarray:
    """Round tick locations covering [lo, hi] (matplotlib-style 1/2/5 steps)."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = np.ceil(lo / step) * step
    ticks = np.arange(first, hi + step * 1e-9, step)
    return ticks[(ticks >= lo - step * 1e-9) & (ticks <= hi + step * 1e-9)]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.2e}"
    return f"{v:.6g}"


class _Canvas:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, color="#888", width=1.0):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"/>'
        )

    def polyline(self, pts, color, width=1.5):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}" stroke-linejoin="round"/>'
        )

    def rect(self, x, y, w, h, color):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{color}" stroke="none"/>'
        )

    def text(self, x, y, s, size=13, anchor="middle", rotate=None, color="#222"):
        tr = f' transform="rotate({rotate} {x:.1f} {y:.1f})"' if rotate else ""
        self.parts.append(
            f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" '
            f'font-size="{size}" fill="{color}" text-anchor="{anchor}"{tr}>{s}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _Axes:
    """Affine data -> pixel mapping inside the margins, with drawn frame."""

    def __init__(self, canvas: _Canvas, xlim, ylim):
        self.c = canvas
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.px0 = MARGIN_L
        self.px1 = canvas.width - MARGIN_R
        self.py0 = canvas.height - MARGIN_B
        self.py1 = MARGIN_T

    def px(self, x):
        return self.px0 + (x - self.x0) / (self.x1 - self.x0) * (self.px1 - self.px0)

    def py(self, y):
        return self.py0 + (y - self.y0) / (self.y1 - self.y0) * (self.py1 - self.py0)

    def frame(self, xlabel: str, ylabel: str, title: str):
        c = self.c
        for xt in _nice_ticks(self.x0, self.x1):
            c.line(self.px(xt), self.py0, self.px(xt), self.py0 + 5, "#222")
            c.text(self.px(xt), self.py0 + 20, _fmt(xt), size=11)
        for yt in _nice_ticks(self.y0, self.y1):
            c.line(self.px0 - 5, self.py(yt), self.px0, self.py(yt), "#222")
            c.text(self.px0 - 8, self.py(yt) + 4, _fmt(yt), size=11, anchor="end")
        c.line(self.px0, self.py0, self.px1, self.py0, "#222", 1.2)
        c.line(self.px0, self.py0, self.px0, self.py1, "#222", 1.2)
        c.text((self.px0 + self.px1) / 2, c.height - 14, xlabel)
        c.text(20, (self.py0 + self.py1) / 2, ylabel, rotate=-90)
        c.text((self.px0 + self.px1) / 2, 22, title, size=15)


def _limits(arrays) -> tuple[float, float]:
    lo = min(float(np.min(a)) for a in arrays)
    hi = max(float(np.max(a)) for a in arrays)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(path, curves, xlabel="", ylabel="", title="",
              width=WIDTH, height=HEIGHT, logy=False) -> None:
    """Write a multi-curve line plot.

    curves: sequence of (x, y, label) triples; label may be "" to omit it
    from the legend.  With logy=True the y data are log10-transformed
    (non-positive values dropped).
    """
    prepared = []
    for i, (x, y, label) in enumerate(curves):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if logy:
            keep = y > 0
            x, y = x[keep], np.log10(y[keep])
        prepared.append((x, y, label, PALETTE[i % len(PALETTE)]))
    c = _Canvas(width, height)
    ax = _Axes(c, _limits([p[0] for p in prepared]), _limits([p[1] for p in prepared]))
    ax.frame(xlabel, ("log10 " + ylabel).strip() if logy else ylabel, title)
    for x, y, label, color in prepared:
        pts = [(ax.px(a), ax.py(b)) for a, b in zip(x, y)]
        c.polyline(pts, color)
    ly = MARGIN_T + 14
    for x, y, label, color in prepared:
        if label:
            c.line(ax.px1 - 150, ly - 4, ax.px1 - 125, ly - 4, color, 2)
            c.text(ax.px1 - 118, ly, label, size=12, anchor="start")
            ly += 18
    with open(path, "w") as fh:
        fh.write(c.render())


def _colormap(v: np.ndarray) -> list[str]:
    """Blue-white-red diverging map for v in [-1, 1] (vectorized, hex)."""
    v = np.clip(v, -1.0, 1.0)
    r = np.where(v >= 0, 255, (1 + v) * 255)
    b = np.where(v <= 0, 255, (1 - v) * 255)
    g = (1 - np.abs(v)) * 255
    return [f"#{int(rr):02x}{int(gg):02x}{int(bb):02x}" for rr, gg, bb in zip(r, g, b)]


def heatmap(path, x, t, z, xlabel="x", ylabel="t", title="",
            width=WIDTH, height=HEIGHT, max_cells=200) -> None:
    """Write a heatmap of z[t, x]; the grid is decimated to at most
    max_cells cells per axis, and colors are symmetric about zero."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    sx = max(1, len(x) // max_cells)
    st = max(1, len(t) // max_cells)
    x, t, z = x[::sx], t[::st], z[::st, ::sx]
    scale = float(np.max(np.abs(z))) or 1.0
    c = _Canvas(width, height)
    ax = _Axes(c, (x[0], x[-1]), (t[0], t[-1]))
    cw = (ax.px1 - ax.px0) / len(x)
    ch = (ax.py0 - ax.py1) / len(t)
    for i in range(len(t)):
        colors = _colormap(z[i] / scale)
        for j in range(len(x)):
            c.rect(ax.px0 + j * cw, ax.py0 - (i + 1) * ch, cw + 0.5, ch + 0.5, colors[j])
    ax.frame(xlabel, ylabel, title)
    with open(path, "w") as fh:
        fh.write(c.render())
