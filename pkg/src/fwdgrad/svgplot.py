"""Self-contained SVG line plots (no plotting dependency).

Fixed 800x500 canvas, two polylines (measured curve and bound curve),
axes with tick labels, optional log10 y-axis. Nonpositive values under a
log axis are clamped to the smallest positive plotted value and flagged
with a warning annotation inside the figure.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 800, 500
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 50

SERIES_STYLE = [("mean gap", "#1f77b4"), ("bound", "#d62728")]


def _ticks_linear(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _ticks_log(lo, hi):
    lo_d, hi_d = math.floor(lo), math.ceil(hi)
    step = max(1, (hi_d - lo_d) // 8 + (1 if (hi_d - lo_d) % 8 else 0))
    return list(range(lo_d, hi_d + 1, step))


def _fmt(v):
    return f"{v:.4g}"


def render_svg(trace, path, log_y=False):
    """Write the trace's mean-gap and bound curves as an SVG file."""
    ks = list(trace.k)
    if not ks:
        raise ValueError("cannot plot an empty trace")
    series = [list(map(float, trace.mean_gap)), list(map(float, trace.bound))]

    warn = None
    if log_y:
        positive = [v for vs in series for v in vs if v > 0]
        if not positive:
            raise ValueError("log scale needs at least one positive value")
        floor = min(positive)
        clamped = sum(1 for vs in series for v in vs if v <= 0)
        if clamped:
            warn = f"warning: {clamped} nonpositive value(s) clamped to {_fmt(floor)}"
            series = [[v if v > 0 else floor for v in vs] for vs in series]
        series = [[math.log10(v) for v in vs] for vs in series]

    x_lo, x_hi = float(ks[0]), float(ks[-1] if ks[-1] > ks[0] else ks[0] + 1)
    y_all = [v for vs in series for v in vs]
    y_lo, y_hi = min(y_all), max(y_all)
    if y_hi <= y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    px_w = WIDTH - MARGIN_L - MARGIN_R
    px_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * px_w

    def sy(y):
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * px_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        # axes
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
    ]

    for xv in _ticks_linear(x_lo, x_hi):
        parts.append(
            f'<line x1="{sx(xv):.1f}" y1="{HEIGHT - MARGIN_B}" x2="{sx(xv):.1f}" '
            f'y2="{HEIGHT - MARGIN_B + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{HEIGHT - MARGIN_B + 18}" font-size="11" '
            f'text-anchor="middle">{_fmt(xv)}</text>')
    yticks = _ticks_log(y_lo, y_hi) if log_y else _ticks_linear(y_lo, y_hi)
    for yv in yticks:
        label = f"1e{yv}" if log_y else _fmt(yv)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{sy(yv):.1f}" x2="{MARGIN_L}" '
            f'y2="{sy(yv):.1f}" stroke="black"/>')
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{sy(yv) + 4:.1f}" font-size="11" '
            f'text-anchor="end">{label}</text>')
    parts.append(
        f'<text x="{MARGIN_L + px_w / 2:.0f}" y="{HEIGHT - 12}" font-size="12" '
        f'text-anchor="middle">k</text>')
    ylabel = "log10 gap" if log_y else "gap"
    parts.append(
        f'<text x="16" y="{MARGIN_T + px_h / 2:.0f}" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 16 {MARGIN_T + px_h / 2:.0f})">'
        f'{ylabel}</text>')

    for (name, color), vs in zip(SERIES_STYLE, series):
        pts = " ".join(f"{sx(x):.2f},{sy(v):.2f}" for x, v in zip(ks, vs))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    for i, (name, color) in enumerate(SERIES_STYLE):
        yleg = MARGIN_T + 14 + 16 * i
        parts.append(
            f'<line x1="{WIDTH - 170}" y1="{yleg}" x2="{WIDTH - 140}" y2="{yleg}" '
            f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{WIDTH - 134}" y="{yleg + 4}" font-size="12">{name}</text>')
    if warn:
        parts.append(
            f'<text x="{MARGIN_L + 4}" y="{MARGIN_T - 8}" font-size="11" '
            f'fill="#b00">{warn}</text>')
    parts.append("</svg>")

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
