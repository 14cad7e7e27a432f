# app/harness/svg.py
"""Minimal SVG line charts for rejection curves."""
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

from app.harness.schema import RejectionCurve

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 60, 180, 40, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _scale(values: Sequence[float], lo: float, hi: float, out_lo: float, out_hi: float) -> List[float]:
    span = (hi - lo) or 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def render_curves(curves: Sequence[RejectionCurve], title: str = "", x_label: str = "sample size",
                  y_label: str = "rejection rate", alpha: Optional[float] = None) -> str:
    """Axes, one polyline per curve, and a legend; y always spans [0, 1]"""
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    xs_all = [x for c in curves for x in c.sample_sizes] or [0, 1]
    x_lo, x_hi = min(xs_all), max(xs_all)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1, x_hi + 1

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        ty = _scale([tick], 0.0, 1.0, y0, y1)[0]
        parts.append(f'<line x1="{x0 - 4}" y1="{_fmt(ty)}" x2="{x0}" y2="{_fmt(ty)}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{_fmt(ty + 4)}" text-anchor="end">{tick:g}</text>')
    for tick in (x_lo, x_hi):
        tx = _scale([tick], x_lo, x_hi, x0, x1)[0]
        parts.append(f'<text x="{_fmt(tx)}" y="{y0 + 18}" text-anchor="middle">{tick:g}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_label)}</text>')
    parts.append(
        f'<text x="16" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.0f})">{escape(y_label)}</text>'
    )
    if alpha is not None:
        ay = _scale([alpha], 0.0, 1.0, y0, y1)[0]
        parts.append(
            f'<line x1="{x0}" y1="{_fmt(ay)}" x2="{x1}" y2="{_fmt(ay)}" stroke="gray" stroke-dasharray="4 3"/>'
        )

    for i, curve in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        px = _scale(curve.sample_sizes, x_lo, x_hi, x0, x1)
        py = _scale(curve.rejection_rates, 0.0, 1.0, y0, y1)
        points = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = MARGIN_TOP + 16 * i
        parts.append(f'<line x1="{x1 + 12}" y1="{ly}" x2="{x1 + 32}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{x1 + 38}" y="{ly + 4}">{escape(curve.method)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
