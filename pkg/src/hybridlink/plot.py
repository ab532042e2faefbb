"""Frontier table (CSV) and line chart (SVG) output."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Tuple
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 30, 40, 60
PAD = 0.05
NTICKS = 5


def frontier_table(artifact) -> np.ndarray:
    f = artifact.frontier
    return np.column_stack([f.risk, f.ror, f.weights])


def write_frontier_csv(artifact, path) -> None:
    table = frontier_table(artifact)
    k = table.shape[1] - 2
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["risk", "ror"] + [f"w{i}" for i in range(1, k + 1)])
        for row in table:
            w.writerow([repr(float(v)) for v in row])


def _padded(lo: float, hi: float) -> Tuple[float, float]:
    span = hi - lo
    if span <= 0:
        span = abs(hi) if hi != 0 else 1.0
    return lo - PAD * span, hi + PAD * span


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def frontier_svg(artifact) -> str:
    f = artifact.frontier
    x, y = f.risk, f.ror
    x0, x1 = _padded(float(x.min()), float(x.max()))
    y0, y1 = _padded(float(y.min()), float(y.max()))
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(v):
        return MARGIN_LEFT + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_TOP + ph - (v - y0) / (y1 - y0) * ph

    out: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    xt = np.linspace(x0, x1, NTICKS)
    yt = np.linspace(y0, y1, NTICKS)
    if artifact.grid:
        out.append('<g class="grid" stroke="#dddddd" stroke-width="1">')
        for v in xt:
            out.append(f'<line x1="{sx(v):.2f}" y1="{MARGIN_TOP}" x2="{sx(v):.2f}" y2="{MARGIN_TOP + ph}"/>')
        for v in yt:
            out.append(f'<line x1="{MARGIN_LEFT}" y1="{sy(v):.2f}" x2="{MARGIN_LEFT + pw}" y2="{sy(v):.2f}"/>')
        out.append("</g>")
    out.append(f'<rect class="axes" x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" '
               'fill="none" stroke="black"/>')
    out.append('<g class="ticks" font-family="sans-serif" font-size="11">')
    for v in xt:
        out.append(f'<text x="{sx(v):.2f}" y="{MARGIN_TOP + ph + 16}" text-anchor="middle">{_fmt(v)}</text>')
    for v in yt:
        out.append(f'<text x="{MARGIN_LEFT - 6}" y="{sy(v) + 4:.2f}" text-anchor="end">{_fmt(v)}</text>')
    out.append("</g>")
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    out.append(f'<polyline class="frontier" points="{pts}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    for a, b in zip(x, y):
        out.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="2.5" fill="#1f77b4"/>')
    if artifact.xlabel:
        out.append(f'<text class="xlabel" x="{MARGIN_LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" '
                   f'text-anchor="middle" font-family="sans-serif" font-size="14">{escape(artifact.xlabel)}</text>')
    if artifact.ylabel:
        cy = MARGIN_TOP + ph / 2
        out.append(f'<text class="ylabel" x="20" y="{cy:.1f}" transform="rotate(-90 20 {cy:.1f})" '
                   f'text-anchor="middle" font-family="sans-serif" font-size="14">{escape(artifact.ylabel)}</text>')
    if artifact.title:
        out.append(f'<text class="title" x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="16">{escape(artifact.title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_frontier_plot(artifact, base) -> Tuple[Path, Path]:
    """Write ``<base>.csv`` and ``<base>.svg``; returns both paths."""
    if len(artifact.frontier) < 2:
        raise ValueError("a frontier plot needs at least two points")
    base = Path(base)
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_name(base.name + ".csv")
    svg_path = base.with_name(base.name + ".svg")
    write_frontier_csv(artifact, csv_path)
    svg_path.write_text(frontier_svg(artifact), encoding="utf-8")
    return csv_path, svg_path
