"""Minimal hand-written SVG renders (no plotting dependency)."""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class _Frame:
    """Maps world coordinates into an SVG canvas with y pointing up."""

    def __init__(self, points: np.ndarray, width: int = 800, margin: float = 30.0):
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        span = np.maximum(hi - lo, 1e-6)
        self.scale = (width - 2 * margin) / float(max(span))
        self.lo = lo
        self.margin = margin
        self.width = width
        self.height = int(round(float(span[1]) * self.scale + 2 * margin))

    def xy(self, p) -> tuple[float, float]:
        x = self.margin + (float(p[0]) - self.lo[0]) * self.scale
        y = self.height - self.margin - (float(p[1]) - self.lo[1]) * self.scale
        return round(x, 2), round(y, 2)

    def polyline(self, pts, color: str, width: float = 1.5, dash: str = "", opacity: float = 1.0) -> str:
        coords = " ".join(f"{x},{y}" for x, y in (self.xy(p) for p in pts))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"'
                f' stroke-opacity="{opacity}"{extra}/>')

    def dots(self, pts, color: str, r: float = 1.5, opacity: float = 1.0) -> list[str]:
        return [f'<circle cx="{x}" cy="{y}" r="{r}" fill="{color}" fill-opacity="{opacity}"/>'
                for x, y in (self.xy(p) for p in pts)]


def _document(width: int, height: int, body: Sequence[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head, f"<title>{escape(title)}</title>",
                      '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def render_run(reference: np.ndarray, obstacle_frames: Sequence[np.ndarray], trace: np.ndarray,
               replanned: Sequence[np.ndarray], title: str = "run") -> str:
    """Reference path, sampled obstacle snapshots, executed trace and every replanned path."""
    parts = [np.asarray(reference), np.asarray(trace)]
    parts += [f for f in obstacle_frames if len(f)]
    parts += [np.asarray(p) for p in replanned]
    frame = _Frame(np.vstack(parts))
    body = []
    n = len(obstacle_frames)
    for i, pts in enumerate(obstacle_frames):
        opacity = round(0.15 + 0.85 * (i + 1) / n, 3) if n else 1.0
        body += frame.dots(pts, "#444444", 1.2, opacity)
    body.append(frame.polyline(reference, "#888888", 2.0, dash="6,4"))
    for i, path in enumerate(replanned):
        body.append(frame.polyline(path, _PALETTE[i % len(_PALETTE)], 1.0, opacity=0.6))
    body.append(frame.polyline(trace, "#000000", 2.0))
    return _document(frame.width, frame.height, body, title)


def render_scaling(series: dict[str, tuple[Sequence[float], Sequence[float]]], title: str = "runtime",
                   width: int = 800, height: int = 500) -> str:
    """Line chart of runtime series against node count."""
    margin = 60.0
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in series.values()])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()])
    ys = ys[np.isfinite(ys)]
    x_max = float(xs.max()) if xs.size else 1.0
    y_max = float(ys.max()) if ys.size else 1.0
    x_max = x_max if x_max > 0 else 1.0
    y_max = y_max if y_max > 0 else 1.0

    def px(x: float, y: float) -> tuple[float, float]:
        return (round(margin + x / x_max * (width - 2 * margin), 2),
                round(height - margin - y / y_max * (height - 2 * margin), 2))

    body = [
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 15}" text-anchor="middle" font-size="14">nodes</text>',
        f'<text x="15" y="{height / 2}" font-size="14" transform="rotate(-90 15 {height / 2})" '
        f'text-anchor="middle">seconds</text>',
        f'<text x="{width - margin}" y="{height - margin + 20}" text-anchor="end" font-size="11">{x_max:.0f}</text>',
        f'<text x="{margin - 5}" y="{margin}" text-anchor="end" font-size="11">{y_max:.3g}</text>',
    ]
    for i, (label, (x, y)) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        pts = [(a, b) for a, b in zip(x, y) if math.isfinite(b)]
        if not pts:
            continue
        coords = " ".join(f"{u},{v}" for u, v in (px(a, b) for a, b in pts))
        body.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        body += [f'<circle cx="{u}" cy="{v}" r="3" fill="{color}"/>' for u, v in (px(a, b) for a, b in pts)]
        body.append(f'<text x="{margin + 10}" y="{margin + 16 * (i + 1)}" font-size="12" fill="{color}">'
                    f'{escape(label)}</text>')
    return _document(width, height, body, title)
