"""Minimal self-contained SVG line plots.

No external assets or libraries: axes, ticks, polylines and the legend are
emitted as plain SVG text with fixed number formatting, so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import math

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if span / step <= target + 1:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < 1e-15 * span else t)
        t += step
    return ticks


def render_line_plot(series, *, title: str, x_label: str, y_label: str,
                     log_x: bool = True, width: int = 880,
                     height: int = 540) -> str:
    """Render labelled curves into one SVG document.

    ``series`` is a list of dicts with keys ``label``, ``x``, ``y`` and
    optional ``color``, ``dashed``, ``stroke_width``.
    """
    ml, mr, mt, mb = 70, 180, 46, 58
    pw, ph = width - ml - mr, height - mt - mb

    xs_all, ys_all = [], []
    for s in series:
        for x, y in zip(s["x"], s["y"]):
            if x is None or y is None:
                continue
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if log_x and x <= 0:
                continue
            xs_all.append(math.log10(x) if log_x else x)
            ys_all.append(y)
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + (abs(y_lo) if y_lo else 1.0)
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    if y_lo > 0 and y_lo < 0.3 * (y_hi - y_lo):
        y_lo = 0.0

    def px(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    out.append(
        f'<text x="{ml + pw / 2:.1f}" y="24" font-family="sans-serif" '
        f'font-size="15" text-anchor="middle">{title}</text>'
    )

    # axes frame
    out.append(
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333" stroke-width="1"/>'
    )

    # x ticks
    if log_x:
        lo_dec, hi_dec = math.floor(x_lo), math.ceil(x_hi)
        x_ticks = []
        for dec in range(lo_dec, hi_dec + 1):
            if x_lo - 1e-9 <= dec <= x_hi + 1e-9:
                x_ticks.append((float(dec), 10.0 ** dec))
    else:
        x_ticks = [(t, t) for t in _nice_ticks(x_lo, x_hi)]
    for pos, label in x_ticks:
        X = px(pos)
        out.append(f'<line x1="{X:.2f}" y1="{mt + ph}" x2="{X:.2f}" '
                   f'y2="{mt + ph + 5}" stroke="#333" stroke-width="1"/>')
        out.append(f'<text x="{X:.2f}" y="{mt + ph + 20}" '
                   f'font-family="sans-serif" font-size="11" '
                   f'text-anchor="middle">{_fmt(label)}</text>')

    for t in _nice_ticks(y_lo, y_hi):
        Y = py(t)
        out.append(f'<line x1="{ml - 5}" y1="{Y:.2f}" x2="{ml}" y2="{Y:.2f}" '
                   f'stroke="#333" stroke-width="1"/>')
        out.append(f'<line x1="{ml}" y1="{Y:.2f}" x2="{ml + pw}" y2="{Y:.2f}" '
                   f'stroke="#ddd" stroke-width="0.5"/>')
        out.append(f'<text x="{ml - 9}" y="{Y + 4:.2f}" '
                   f'font-family="sans-serif" font-size="11" '
                   f'text-anchor="end">{_fmt(t)}</text>')

    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 14}" '
               f'font-family="sans-serif" font-size="13" '
               f'text-anchor="middle">{x_label}</text>')
    out.append(f'<text x="20" y="{mt + ph / 2:.1f}" font-family="sans-serif" '
               f'font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 20 {mt + ph / 2:.1f})">{y_label}</text>')

    # curves
    legend_y = mt + 10
    for idx, s in enumerate(series):
        color = s.get("color") or PALETTE[idx % len(PALETTE)]
        sw = s.get("stroke_width", 1.6)
        dash = ' stroke-dasharray="6 4"' if s.get("dashed") else ""
        pts = []
        for x, y in zip(s["x"], s["y"]):
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if log_x and x <= 0:
                continue
            pts.append(f"{px(math.log10(x) if log_x else x):.2f},{py(y):.2f}")
        if pts:
            out.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                       f'stroke="{color}" stroke-width="{sw}"{dash}/>')
        lx = ml + pw + 14
        out.append(f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 24}" '
                   f'y2="{legend_y}" stroke="{color}" stroke-width="{sw}"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{legend_y + 4}" '
                   f'font-family="sans-serif" font-size="11">{s["label"]}</text>')
        legend_y += 18

    out.append("</svg>")
    return "\n".join(out) + "\n"
