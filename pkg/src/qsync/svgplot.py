"""Minimal native SVG rendering: polyline charts and heatmaps.

No plotting dependency; output is deterministic text so exported figures are
byte-stable across runs.
"""

from __future__ import annotations

import math

import numpy as np

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 24, 40, 52

PALETTE = ["#c0392b", "#2471a3", "#1e8449", "#b7950b", "#7d3c98", "#117a65",
           "#a04000", "#5d6d7e"]

# viridis-like anchors for the heatmap ramp
_RAMP = [(0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
         (0.75, (94, 201, 98)), (1.0, (253, 231, 37))]


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / max(n - 1, 1)))
    for mult in (1, 2, 2.5, 5, 10):
        if span / (step * mult) <= n - 1:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * span:
        out.append(round(t, 12))
        t += step
    return out or [lo]


def _fmt_tick(x: float) -> str:
    if x == 0:
        return "0"
    if abs(x) >= 1e4 or abs(x) < 1e-3:
        return f"{x:.2e}"
    return f"{x:g}"


def _color(value: float) -> str:
    v = min(max(value, 0.0), 1.0)
    for (a, ca), (b, cb) in zip(_RAMP, _RAMP[1:]):
        if v <= b:
            f = (v - a) / (b - a) if b > a else 0.0
            rgb = tuple(round(x + f * (y - x)) for x, y in zip(ca, cb))
            return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"
    return "rgb(253,231,37)"


def _header(title: str, description: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<desc>{description.replace('&', '&amp;').replace('<', '&lt;')}</desc>",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]


def _axes(parts: list[str], x_lo, x_hi, y_lo, y_hi, xlabel, ylabel) -> tuple:
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return MARGIN_T + ph - (y - y_lo) / (y_hi - y_lo) * ph

    parts.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
                 'fill="none" stroke="#333" stroke-width="1"/>')
    for t in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{sx(t):.2f}" y1="{MARGIN_T + ph}" x2="{sx(t):.2f}" '
                     f'y2="{MARGIN_T + ph + 5}" stroke="#333"/>')
        parts.append(f'<text x="{sx(t):.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{sy(t):.2f}" x2="{MARGIN_L}" '
                     f'y2="{sy(t):.2f}" stroke="#333"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{sy(t):.2f}" text-anchor="end" '
                     f'dominant-baseline="middle" font-family="sans-serif" '
                     f'font-size="11">{_fmt_tick(t)}</text>')
    parts.append(f'<text x="{MARGIN_L + pw / 2:.0f}" y="{HEIGHT - 14}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="18" y="{MARGIN_T + ph / 2:.0f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.0f})">{ylabel}</text>')
    return sx, sy


def line_chart(times: np.ndarray, series: dict[str, np.ndarray], title: str,
               xlabel: str, ylabel: str, description: str = "",
               fixed_range: tuple[float, float] | None = None) -> str:
    """Polyline chart of one or more named series over a common grid."""
    times = np.asarray(times, dtype=float)
    finite = [np.asarray(v, dtype=float) for v in series.values()]
    stacked = np.concatenate([v[np.isfinite(v)] for v in finite]) if finite else np.array([0.0])
    if fixed_range is not None:
        y_lo, y_hi = fixed_range
    else:
        y_lo, y_hi = float(stacked.min(initial=0.0)), float(stacked.max(initial=1.0))
        if y_hi <= y_lo:
            y_hi = y_lo + 1.0
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = float(times[0]), float(times[-1])
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    parts = _header(title, description)
    sx, sy = _axes(parts, x_lo, x_hi, y_lo, y_hi, xlabel, ylabel)
    for k, (name, values) in enumerate(series.items()):
        values = np.asarray(values, dtype=float)
        color = PALETTE[k % len(PALETTE)]
        # NaN gaps split the polyline
        segments: list[list[str]] = [[]]
        for t, v in zip(times, values):
            if math.isnan(v):
                if segments[-1]:
                    segments.append([])
                continue
            vc = min(max(v, y_lo), y_hi)
            segments[-1].append(f"{sx(t):.2f},{sy(vc):.2f}")
        for seg in segments:
            if len(seg) >= 2:
                parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.3" '
                             f'points="{" ".join(seg)}"/>')
        parts.append(f'<rect x="{MARGIN_L + 10}" y="{MARGIN_T + 8 + 16 * k}" width="14" '
                     f'height="3" fill="{color}"/>')
        parts.append(f'<text x="{MARGIN_L + 30}" y="{MARGIN_T + 13 + 16 * k}" '
                     f'font-family="sans-serif" font-size="11">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heatmap(x: np.ndarray, y: np.ndarray, values: np.ndarray, title: str,
            xlabel: str, ylabel: str, description: str = "") -> str:
    """Cell heatmap of ``values[i, j]`` over ``y[i]`` (rows) and ``x[j]`` (cols).

    NaN cells render gray; the color ramp is normalized to [0, 1] which suits
    |C| maps directly.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    values = np.asarray(values, dtype=float)
    pw = WIDTH - MARGIN_L - MARGIN_R - 60
    ph = HEIGHT - MARGIN_T - MARGIN_B
    cw, ch = pw / x.size, ph / y.size

    parts = _header(title, description)
    for i in range(y.size):
        for j in range(x.size):
            v = values[i, j]
            fill = "#bbbbbb" if math.isnan(v) else _color(v)
            px = MARGIN_L + j * cw
            py = MARGIN_T + ph - (i + 1) * ch
            parts.append(f'<rect x="{px:.2f}" y="{py:.2f}" width="{cw + 0.5:.2f}" '
                         f'height="{ch + 0.5:.2f}" fill="{fill}"/>')
    parts.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw:.0f}" height="{ph}" '
                 'fill="none" stroke="#333"/>')
    for j in range(0, x.size, max(1, x.size // 5)):
        px = MARGIN_L + (j + 0.5) * cw
        parts.append(f'<text x="{px:.1f}" y="{MARGIN_T + ph + 16}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{_fmt_tick(x[j])}</text>')
    for i in range(0, y.size, max(1, y.size // 5)):
        py = MARGIN_T + ph - (i + 0.5) * ch
        parts.append(f'<text x="{MARGIN_L - 8}" y="{py:.1f}" text-anchor="end" '
                     f'dominant-baseline="middle" font-family="sans-serif" '
                     f'font-size="11">{_fmt_tick(y[i])}</text>')
    parts.append(f'<text x="{MARGIN_L + pw / 2:.0f}" y="{HEIGHT - 14}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="18" y="{MARGIN_T + ph / 2:.0f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.0f})">{ylabel}</text>')
    # colorbar
    bx = WIDTH - MARGIN_R - 36
    for k in range(40):
        v = 1.0 - k / 39
        parts.append(f'<rect x="{bx}" y="{MARGIN_T + k * ph / 40:.2f}" width="14" '
                     f'height="{ph / 40 + 0.5:.2f}" fill="{_color(v)}"/>')
    parts.append(f'<text x="{bx + 18}" y="{MARGIN_T + 6}" font-family="sans-serif" '
                 f'font-size="10">1</text>')
    parts.append(f'<text x="{bx + 18}" y="{MARGIN_T + ph}" font-family="sans-serif" '
                 f'font-size="10">0</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
