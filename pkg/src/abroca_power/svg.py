"""Minimal static SVG line charts, byte-deterministic given the data.

The CSV output is the authoritative artifact; these charts are a visual
aid, so the renderer stays dependency-free: axes, gridlines, one polyline
per condition, reference lines at the significance level and at power 0.8.
"""

from __future__ import annotations

_WIDTH = 840
_HEIGHT = 520
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 220
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 60

_PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


def _fx(x, x_min, x_max):
    span = max(x_max - x_min, 1e-12)
    inner = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    return _MARGIN_LEFT + (x - x_min) / span * inner


def _fy(y):
    inner = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM
    return _MARGIN_TOP + (1.0 - y) * inner


def _nice_ticks(lo, hi, target=6):
    span = max(hi - lo, 1e-12)
    raw = span / target
    magnitude = 10 ** int(f"{raw:e}".split("e")[1])
    for mult in (1, 2, 5, 10):
        step = mult * magnitude
        if span / step <= target:
            break
    first = int(lo // step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        if t >= lo - 1e-9 * span:
            ticks.append(t)
        t += step
    return ticks


def power_chart(rows, alpha: float, title: str) -> str:
    """Render power-versus-sample-size polylines, one per condition.

    ``rows`` are PowerRow-like records; cells that failed (power is None)
    are skipped. Returns the SVG document as a string.
    """
    rows = [r for r in rows if r.power is not None]
    if not rows:
        raise ValueError("no successful cells to plot")
    xs = sorted({r.n_total for r in rows})
    x_min, x_max = float(xs[0]), float(xs[-1])
    if x_min == x_max:
        x_min -= 0.5
        x_max += 0.5
    conditions = sorted({(r.auc_diff, r.ratio_group, r.ratio_pos_case) for r in rows})
    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="monospace" font-size="12">'
    )
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>')
    out.append(f'<text x="{_MARGIN_LEFT}" y="24" font-size="15">{title}</text>')
    plot_r = _WIDTH - _MARGIN_RIGHT
    plot_b = _HEIGHT - _MARGIN_BOTTOM
    # gridlines and axes
    for y in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        py = _fy(y)
        out.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{py:.2f}" x2="{plot_r}" y2="{py:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(f'<text x="{_MARGIN_LEFT - 38}" y="{py + 4:.2f}">{y:.1f}</text>')
    for x in _nice_ticks(x_min, x_max):
        px = _fx(x, x_min, x_max)
        out.append(
            f'<line x1="{px:.2f}" y1="{_MARGIN_TOP}" x2="{px:.2f}" y2="{plot_b}" '
            f'stroke="#eeeeee" stroke-width="1"/>'
        )
        out.append(f'<text x="{px - 14:.2f}" y="{plot_b + 18}">{x:g}</text>')
    out.append(
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" width="{plot_r - _MARGIN_LEFT}" '
        f'height="{plot_b - _MARGIN_TOP}" fill="none" stroke="black" stroke-width="1"/>'
    )
    # reference lines
    for level, name in ((0.8, "power = 0.8"), (alpha, f"alpha = {alpha:g}")):
        py = _fy(level)
        out.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{py:.2f}" x2="{plot_r}" y2="{py:.2f}" '
            f'stroke="#555555" stroke-width="1" stroke-dasharray="6,4"/>'
        )
        out.append(f'<text x="{plot_r - 98}" y="{py - 4:.2f}" fill="#555555">{name}</text>')
    # series
    for idx, condition in enumerate(conditions):
        d, rg, rp = condition
        color = _PALETTE[idx % len(_PALETTE)]
        points = sorted(
            (r.n_total, r.power)
            for r in rows
            if (r.auc_diff, r.ratio_group, r.ratio_pos_case) == condition
        )
        path = " ".join(f"{_fx(x, x_min, x_max):.2f},{_fy(y):.2f}" for x, y in points)
        out.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for x, y in points:
            out.append(
                f'<circle cx="{_fx(x, x_min, x_max):.2f}" cy="{_fy(y):.2f}" r="3" fill="{color}"/>'
            )
        ly = _MARGIN_TOP + 16 + 18 * idx
        out.append(
            f'<line x1="{plot_r + 12}" y1="{ly - 4}" x2="{plot_r + 34}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{plot_r + 40}" y="{ly}">d={d:g} g={rg:g} p={rp:g}</text>'
        )
    out.append(
        f'<text x="{(_MARGIN_LEFT + plot_r) // 2 - 60}" y="{_HEIGHT - 16}">'
        "total test-set size</text>"
    )
    out.append(
        f'<text x="16" y="{(_MARGIN_TOP + plot_b) // 2}" '
        f'transform="rotate(-90 16 {(_MARGIN_TOP + plot_b) // 2})">power</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
