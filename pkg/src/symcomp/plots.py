"""Minimal SVG line charts written by hand.

Keeps the package free of plotting dependencies; output is deterministic
(fixed viewport, fixed tick logic, no timestamps).
"""

from __future__ import annotations

import math

import numpy as np

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 40, 50
_COLORS = ("#1f5fa8", "#c0392b", "#1e8449", "#7d3c98", "#b7950b")


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= m * mag:
            step = m * mag
            break
    t0 = math.ceil(lo / step) * step
    out = []
    t = t0
    while t <= hi + 1e-9 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def _log_ticks(lo: float, hi: float):
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(lo_e, hi_e + 1)
            if lo * (1 - 1e-9) <= 10.0 ** e <= hi * (1 + 1e-9)]


def line_chart(series, title: str, xlabel: str, ylabel: str,
               logx: bool = False, logy: bool = False) -> str:
    """Render labelled (x, y) polylines to an SVG string.

    series: iterable of (label, x_array, y_array).
    """
    series = [(str(lab), np.asarray(x, dtype=float), np.asarray(y, dtype=float))
              for lab, x, y in series]
    if not series:
        raise ValueError("need at least one series")

    def tx(x):
        return np.log10(x) if logx else x

    def ty(y):
        return np.log10(y) if logy else y

    xs = np.concatenate([tx(s[1]) for s in series])
    ys = np.concatenate([ty(s[2]) for s in series])
    xlo, xhi = float(np.min(xs)), float(np.max(xs))
    ylo, yhi = float(np.min(ys)), float(np.max(ys))
    if xhi <= xlo:
        xhi = xlo + 1.0
    if yhi <= ylo:
        yhi = ylo + 1.0
    padx = 0.04 * (xhi - xlo)
    pady = 0.06 * (yhi - ylo)
    xlo, xhi = xlo - padx, xhi + padx
    ylo, yhi = ylo - pady, yhi + pady

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def px(x):
        return _ML + (x - xlo) / (xhi - xlo) * pw

    def py(y):
        return _MT + ph - (y - ylo) / (yhi - ylo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#444" stroke-width="1"/>',
    ]

    if logx:
        xticks = [math.log10(t) for t in _log_ticks(10 ** xlo, 10 ** xhi)]
        xlabels = [f"1e{int(round(t))}" for t in xticks]
    else:
        xticks = _ticks(xlo, xhi)
        xlabels = [f"{t:.4g}" for t in xticks]
    if logy:
        yticks = [math.log10(t) for t in _log_ticks(10 ** ylo, 10 ** yhi)]
        ylabels = [f"1e{int(round(t))}" for t in yticks]
    else:
        yticks = _ticks(ylo, yhi)
        ylabels = [f"{t:.4g}" for t in yticks]

    for t, lab in zip(xticks, xlabels):
        x = px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{_MT + ph}" x2="{x:.1f}" '
                     f'y2="{_MT + ph + 5}" stroke="#444"/>')
        parts.append(f'<text x="{x:.1f}" y="{_MT + ph + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{lab}</text>')
    for t, lab in zip(yticks, ylabels):
        y = py(t)
        parts.append(f'<line x1="{_ML - 5}" y1="{y:.1f}" x2="{_ML}" '
                     f'y2="{y:.1f}" stroke="#444"/>')
        parts.append(f'<text x="{_ML - 8}" y="{y + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{lab}</text>')

    parts.append(f'<text x="{_ML + pw / 2:.1f}" y="{_H - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{xlabel}</text>')
    parts.append(f'<text x="18" y="{_MT + ph / 2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 18 {_MT + ph / 2:.1f})">{ylabel}</text>')

    for k, (lab, x, y) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        pxs, pys = px(tx(x)), py(ty(y))
        pt_str = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(pxs, pys))
        parts.append(f'<polyline points="{pt_str}" fill="none" '
                     f'stroke="{color}" stroke-width="1.6"/>')
        ly = _MT + 16 + 16 * k
        parts.append(f'<line x1="{_ML + pw - 150}" y1="{ly - 4}" '
                     f'x2="{_ML + pw - 125}" y2="{ly - 4}" stroke="{color}" '
                     f'stroke-width="1.6"/>')
        parts.append(f'<text x="{_ML + pw - 120}" y="{ly}" '
                     f'font-family="sans-serif" font-size="12">{lab}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
