"""Minimal SVG line plots (no plotting dependency)."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
WIDTH, HEIGHT, MARGIN = 640, 400, 56


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def line_plot(x, series: dict, xlabel: str = "", ylabel: str = "", title: str = "",
              logx: bool = False) -> str:
    """Render ``series`` (label -> y array) against ``x`` as an SVG document."""
    x = np.asarray(x, dtype=float)
    if logx:
        if np.any(x <= 0):
            raise ValueError("log axis needs positive x")
        x = np.log10(x)
    ys = [np.asarray(y, dtype=float) for y in series.values()]
    finite = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.array([0.0])
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    x_lo, x_hi = float(x.min()), float(x.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(v):
        return MARGIN + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" '
           'fill="none" stroke="black"/>']
    for t in _ticks(x_lo, x_hi):
        label = f"1e{t:.3g}" if logx else f"{t:.4g}"
        out.append(f'<text x="{sx(t):.2f}" y="{HEIGHT - MARGIN + 16}" font-size="11" '
                   f'text-anchor="middle">{label}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<text x="{MARGIN - 6}" y="{sy(t) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{t:.4g}</text>')
    for k, (label, y) in enumerate(zip(series, ys)):
        color = COLORS[k % len(COLORS)]
        pts, segments = [], []
        for xi, yi in zip(x, y):
            if np.isfinite(yi):
                pts.append(f"{sx(xi):.2f},{sy(yi):.2f}")
            elif pts:
                segments.append(pts)
                pts = []
        if pts:
            segments.append(pts)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" '
                       f'points="{" ".join(seg)}"/>')
        out.append(f'<text x="{WIDTH - MARGIN - 4}" y="{MARGIN + 16 + 14 * k}" font-size="11" '
                   f'text-anchor="end" fill="{color}">{escape(label)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" font-size="12" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{HEIGHT / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="{MARGIN - 14}" font-size="13" '
                   f'text-anchor="middle">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
