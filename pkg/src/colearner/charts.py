"""Hand-emitted SVG line charts for benchmark results.

Fixed 800x500 viewport, 10 ticks per axis, one polyline plus circle markers
per series, legend on the right. Output is a pure function of the input
points, so identical data yields byte-identical SVG.
"""
from __future__ import annotations

from typing import Sequence

from .errors import DataError

WIDTH = 800
HEIGHT = 500
_PLOT = (70.0, 40.0, 640.0, 445.0)  # left, top, right, bottom
_N_TICKS = 10
_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
)


def _span(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = max(1.0, abs(lo) * 0.1)
        return lo - pad, hi + pad
    return lo, hi


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.4g}"


def render_line_chart(
    series: Sequence[tuple[str, Sequence[tuple[float, float]]]],
    x_label: str,
    y_label: str,
    title: str | None = None,
) -> str:
    """Render named (x, y) point series to an SVG document string."""
    if not series or all(not pts for _, pts in series):
        raise DataError("nothing to plot: no series or no points")
    xs = [p[0] for _, pts in series for p in pts]
    ys = [p[1] for _, pts in series for p in pts]
    x_lo, x_hi = _span(xs)
    y_lo, y_hi = _span(ys)
    left, top, right, bottom = _PLOT

    def sx(v: float) -> float:
        return left + (v - x_lo) / (x_hi - x_lo) * (right - left)

    def sy(v: float) -> float:
        return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{(left + right) / 2:.0f}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_escape(title)}</text>'
        )

    # Axes, ticks and grid.
    out.append(
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(right - left)}" '
        f'height="{_fmt(bottom - top)}" fill="none" stroke="black"/>'
    )
    for i in range(_N_TICKS):
        frac = i / (_N_TICKS - 1)
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        px = sx(xv)
        py = sy(yv)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(top)}" x2="{_fmt(px)}" y2="{_fmt(bottom)}" '
            f'stroke="#dddddd"/>'
        )
        out.append(
            f'<line x1="{_fmt(left)}" y1="{_fmt(py)}" x2="{_fmt(right)}" y2="{_fmt(py)}" '
            f'stroke="#dddddd"/>'
        )
        out.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(bottom)}" x2="{_fmt(px)}" y2="{_fmt(bottom + 5)}" '
            f'stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{_fmt(bottom + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_label(xv)}</text>'
        )
        out.append(
            f'<line x1="{_fmt(left - 5)}" y1="{_fmt(py)}" x2="{_fmt(left)}" y2="{_fmt(py)}" '
            f'stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(left - 8)}" y="{_fmt(py + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_label(yv)}</text>'
        )
    out.append(
        f'<text x="{(left + right) / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="16" y="{(top + bottom) / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(top + bottom) / 2:.0f})">{_escape(y_label)}</text>'
    )

    # Series polylines, markers and legend.
    for si, (name, pts) in enumerate(series):
        color = _PALETTE[si % len(_PALETTE)]
        ordered = sorted(pts, key=lambda p: (p[0], p[1]))
        coords = " ".join(f"{_fmt(sx(px))},{_fmt(sy(py))}" for px, py in ordered)
        if len(ordered) > 1:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for px, py in ordered:
            out.append(f'<circle cx="{_fmt(sx(px))}" cy="{_fmt(sy(py))}" r="3" fill="{color}"/>')
        ly = top + 16 + 18 * si
        out.append(
            f'<line x1="{_fmt(right + 12)}" y1="{_fmt(ly - 4)}" x2="{_fmt(right + 36)}" '
            f'y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{_fmt(right + 42)}" y="{_fmt(ly)}" font-family="sans-serif" '
            f'font-size="12">{_escape(str(name))}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )
