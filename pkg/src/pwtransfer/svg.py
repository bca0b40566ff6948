"""Minimal SVG writer: intensity maps and line plots, nothing else.

Output is a plain string built with fixed float formatting so that identical
inputs give byte-identical files.
"""
from __future__ import annotations

from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["heatmap", "line_plot", "colormap"]

# anchor colours of a perceptually ordered dark-blue -> yellow map
_ANCHORS = np.array([
    [0.267, 0.005, 0.329],
    [0.229, 0.322, 0.546],
    [0.128, 0.567, 0.551],
    [0.369, 0.789, 0.383],
    [0.993, 0.906, 0.144],
])
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f")

W, H = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 30, 40, 55


def _f(v: float) -> str:
    return f"{v:.2f}"


def colormap(s) -> list[str]:
    """Hex colours for values in [0, 1] (clipped)."""
    s = np.clip(np.asarray(s, dtype=float).ravel(), 0.0, 1.0)
    pos = s * (len(_ANCHORS) - 1)
    i = np.minimum(pos.astype(int), len(_ANCHORS) - 2)
    frac = (pos - i)[:, None]
    rgb = (1 - frac) * _ANCHORS[i] + frac * _ANCHORS[i + 1]
    return ["#%02x%02x%02x" % tuple(int(round(255 * c)) for c in row) for row in rgb]


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step - 1e-9) * step
    return np.arange(start, hi + 1e-9 * step, step)


def _label(v: float) -> str:
    return f"{v:.4g}" if abs(v) > 1e-12 else "0"


def _frame(title: str, xlabel: str, ylabel: str, xr, yr, comment: str) -> list[str]:
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
           'font-family="sans-serif" font-size="12">']
    if comment:
        out.append(f"<!-- {escape(comment).replace('--', '- -')} -->")
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
    out.append(f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2})">{escape(ylabel)}</text>')
    for t in _ticks(*xr):
        px = LEFT + (t - xr[0]) / (xr[1] - xr[0] or 1) * pw
        out.append(f'<line x1="{_f(px)}" y1="{TOP + ph}" x2="{_f(px)}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(px)}" y="{TOP + ph + 18}" text-anchor="middle">{_label(t)}</text>')
    for t in _ticks(*yr):
        py = TOP + ph - (t - yr[0]) / (yr[1] - yr[0] or 1) * ph
        out.append(f'<line x1="{LEFT - 5}" y1="{_f(py)}" x2="{LEFT}" y2="{_f(py)}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_f(py + 4)}" text-anchor="end">{_label(t)}</text>')
    return out


def heatmap(values: np.ndarray, x: Sequence[float], y: Sequence[float], title: str = "",
            xlabel: str = "x", ylabel: str = "t", comment: str = "") -> str:
    """Intensity plot of ``values[j, i]`` at (x[i], y[j]), linear colour scale."""
    z = np.asarray(values, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if z.shape != (y.size, x.size):
        raise ValueError("values must have shape (len(y), len(x))")
    fin = np.isfinite(z)
    lo = float(np.min(z[fin])) if fin.any() else 0.0
    hi = float(np.max(z[fin])) if fin.any() else 1.0
    s = (z - lo) / (hi - lo) if hi > lo else np.zeros_like(z)
    colours = np.array(colormap(np.where(fin, s, 0.0))).reshape(z.shape)
    xr, yr = (float(x[0]), float(x[-1])), (float(y[0]), float(y[-1]))
    out = _frame(title, xlabel, ylabel, xr, yr, comment)
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
    # cell edges at midpoints between samples
    xe = np.concatenate([[x[0]], 0.5 * (x[1:] + x[:-1]), [x[-1]]])
    ye = np.concatenate([[y[0]], 0.5 * (y[1:] + y[:-1]), [y[-1]]])
    px = LEFT + (xe - xr[0]) / (xr[1] - xr[0] or 1) * pw
    py = TOP + ph - (ye - yr[0]) / (yr[1] - yr[0] or 1) * ph
    out.append('<g shape-rendering="crispEdges">')
    for j in range(y.size):
        for i in range(x.size):
            out.append(f'<rect x="{_f(px[i])}" y="{_f(py[j + 1])}" width="{_f(px[i + 1] - px[i] + 0.3)}" '
                       f'height="{_f(py[j] - py[j + 1] + 0.3)}" fill="{colours[j, i]}"/>')
    out.append("</g>")
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{W - RIGHT}" y="{TOP - 6}" text-anchor="end" font-size="10">'
               f'range [{_label(lo)}, {_label(hi)}]</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_plot(x: Sequence[float], series: Sequence[tuple[str, Sequence[float]]], title: str = "",
              xlabel: str = "x", ylabel: str = "", comment: str = "",
              ylim: Optional[tuple[float, float]] = None) -> str:
    """Several curves over a shared abscissa; non-finite points break the line."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for _, v in series]
    fin = np.concatenate([v[np.isfinite(v)] for v in ys]) if ys else np.zeros(1)
    if ylim is None:
        lo, hi = (float(np.min(fin)), float(np.max(fin))) if fin.size else (0.0, 1.0)
        pad = 0.05 * (hi - lo) if hi > lo else 0.5
        ylim = (lo - pad, hi + pad)
    xr = (float(np.min(x)), float(np.max(x)))
    out = _frame(title, xlabel, ylabel, xr, ylim, comment)
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for k, ((name, _), v) in enumerate(zip(series, ys)):
        colour = _PALETTE[k % len(_PALETTE)]
        px = LEFT + (x - xr[0]) / (xr[1] - xr[0] or 1) * pw
        py = TOP + ph - (np.clip(v, *ylim) - ylim[0]) / (ylim[1] - ylim[0] or 1) * ph
        ok = np.isfinite(v)
        # one polyline per finite run
        runs, cur = [], []
        for i in range(x.size):
            if ok[i]:
                cur.append(f"{_f(px[i])},{_f(py[i])}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        dash = ' stroke-dasharray="6 4"' if k % 2 else ""
        for r in runs:
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.6"{dash} points="{" ".join(r)}"/>')
        ly = TOP + 16 + 16 * k
        out.append(f'<line x1="{W - RIGHT - 150}" y1="{ly}" x2="{W - RIGHT - 125}" y2="{ly}" '
                   f'stroke="{colour}" stroke-width="1.6"{dash}/>')
        out.append(f'<text x="{W - RIGHT - 120}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
