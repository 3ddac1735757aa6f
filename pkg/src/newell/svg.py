"""Minimal static SVG line plots (polylines, ticks, shaded x-bands)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 900, 480
MARGIN = dict(left=70, right=20, top=40, bottom=60)


@dataclass
class Curve:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str = "black"
    dash: str | None = None


@dataclass
class Band:
    x0: float
    x1: float
    label: str
    color: str


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    return [round(first + i * step, 12) for i in range(int((hi - first) / step + 1e-9) + 1)]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_plot(
    curves: list[Curve],
    bands: list[Band] = (),
    title: str = "",
    xlabel: str = "x",
    ylabel: str = "",
    note: str | None = None,
) -> str:
    """Render curves over shaded bands; NaN samples break the polyline."""
    xs = [c.x[np.isfinite(c.y)] for c in curves]
    ys = [c.y[np.isfinite(c.y)] for c in curves]
    allx = np.concatenate(xs + [np.array([b.x0, b.x1]) for b in bands]) if (curves or bands) else np.array([])
    ally = np.concatenate(ys) if ys else np.array([])
    xlo, xhi = (float(allx.min()), float(allx.max())) if allx.size else (0.0, 1.0)
    ylo, yhi = 0.0, (float(ally.max()) * 1.05 if ally.size and ally.max() > 0 else 1.0)
    if xhi <= xlo:
        xhi = xlo + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - xlo) / (xhi - xlo) * pw

    def py(v):
        return MARGIN["top"] + ph - (v - ylo) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    for b in bands:
        x0, x1 = max(b.x0, xlo), min(b.x1, xhi)
        if x1 <= x0:
            continue
        out.append(
            f'<rect x="{px(x0):.2f}" y="{MARGIN["top"]}" width="{px(x1) - px(x0):.2f}" height="{ph}" '
            f'fill="{b.color}" fill-opacity="0.15"><title>{escape(b.label)}</title></rect>'
        )
        out.append(
            f'<text x="{0.5 * (px(x0) + px(x1)):.2f}" y="{MARGIN["top"] + 14}" text-anchor="middle" '
            f'fill="#555">{escape(b.label)}</text>'
        )
    out.append(
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    for v in nice_ticks(xlo, xhi):
        X = px(v)
        out.append(f'<line x1="{X:.2f}" y1="{MARGIN["top"] + ph}" x2="{X:.2f}" y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle">{_fmt(v)}</text>')
    for v in nice_ticks(ylo, yhi):
        Y = py(v)
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y:.2f}" x2="{MARGIN["left"]}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(v)}</text>')
    for c in curves:
        for seg in _segments(c.x, c.y):
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in seg)
            dash = f' stroke-dasharray="{c.dash}"' if c.dash else ""
            out.append(f'<polyline points="{pts}" fill="none" stroke="{c.color}" stroke-width="1.5"{dash}/>')
    for i, c in enumerate(curves):
        y = MARGIN["top"] + 30 + 16 * i
        x = MARGIN["left"] + pw - 170
        dash = f' stroke-dasharray="{c.dash}"' if c.dash else ""
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 24}" y2="{y}" stroke="{c.color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{x + 30}" y="{y + 4}">{escape(c.label)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>'
    )
    if note:
        out.append(
            f'<text x="{MARGIN["left"] + pw / 2}" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
            f'font-size="16" fill="#a00">{escape(note)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _segments(x, y):
    seg = []
    for a, b in zip(x, y):
        if np.isfinite(b):
            seg.append((a, b))
        elif seg:
            yield seg
            seg = []
    if seg:
        yield seg


def region_bands(x: np.ndarray, labels: list[str], colors: dict[str, str]) -> list[Band]:
    """Merge runs of equal labels into bands spanning midpoints between samples."""
    bands: list[Band] = []
    if len(x) == 0:
        return bands
    mids = np.concatenate([[x[0]], 0.5 * (x[1:] + x[:-1]), [x[-1]]])
    start = 0
    for i in range(1, len(x) + 1):
        if i == len(x) or labels[i] != labels[start]:
            lab = labels[start]
            bands.append(Band(float(mids[start]), float(mids[i]), lab, colors.get(lab, "#999999")))
            start = i
    return bands
