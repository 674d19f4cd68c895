"""Minimal self-contained SVG line charts for quick inspection.

Fixed 800x600 viewBox, linear axes, one polyline per series. Output is
a deterministic function of the input series.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f")

_W, _H = 800, 600
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi == lo:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def line_chart(series, title: str = "", x_label: str = "", y_label: str = "") -> str:
    """Render labeled (xs, ys) series to an SVG document string.

    Parameters
    ----------
    series : list of (label, xs, ys)
    title, x_label, y_label : str
    """
    if not series:
        raise ValueError("need at least one series")
    xs_all = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    if xs_all.size == 0:
        raise ValueError("series must hold data")
    x_lo, x_hi = float(np.min(xs_all)), float(np.max(xs_all))
    y_lo, y_hi = float(np.min(ys_all)), float(np.max(ys_all))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return _MT + ph - (y - y_lo) / (y_hi - y_lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
        f'font-family="sans-serif" font-size="13">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{_W // 2}" y="24" text-anchor="middle" '
                     f'font-size="16">{escape(title)}</text>')
    # frame and ticks
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
                 f'fill="none" stroke="#333" stroke-width="1"/>')
    for xv in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{px(xv):.2f}" y1="{_MT + ph}" x2="{px(xv):.2f}" '
                     f'y2="{_MT + ph + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px(xv):.2f}" y="{_MT + ph + 20}" '
                     f'text-anchor="middle">{xv:.4g}</text>')
    for yv in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{_ML - 5}" y1="{py(yv):.2f}" x2="{_ML}" '
                     f'y2="{py(yv):.2f}" stroke="#333"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py(yv):.2f}" text-anchor="end" '
                     f'dominant-baseline="middle">{yv:.4g}</text>')
    if x_label:
        parts.append(f'<text x="{_ML + pw / 2:.0f}" y="{_H - 10}" '
                     f'text-anchor="middle">{escape(x_label)}</text>')
    if y_label:
        parts.append(f'<text x="18" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
                     f'transform="rotate(-90 18 {_MT + ph / 2:.0f})">{escape(y_label)}</text>')
    for i, (label, xs, ys) in enumerate(series):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 8}" y="{_MT + 18 + 16 * i}" '
                     f'text-anchor="end" fill="{color}">{escape(str(label))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
