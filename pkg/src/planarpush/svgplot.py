"""Minimal deterministic SVG writer for trajectory overlay plots.

Hand-rolled instead of a plotting library so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import math
from typing import Sequence


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class SvgCanvas:
    def __init__(self, x_min: float, x_max: float, y_min: float, y_max: float,
                 width: int = 720, margin: float = 30.0):
        span_x = max(x_max - x_min, 1e-9)
        span_y = max(y_max - y_min, 1e-9)
        self.scale = (width - 2 * margin) / span_x
        self.width = width
        self.height = int(math.ceil(span_y * self.scale + 2 * margin))
        self.margin = margin
        self.x_min = x_min
        self.y_max = y_max
        self._parts: list[str] = []

    def _map(self, x: float, y: float) -> tuple[float, float]:
        return (
            self.margin + (x - self.x_min) * self.scale,
            self.margin + (self.y_max - y) * self.scale,
        )

    def polyline(self, points: Sequence[Sequence[float]], stroke: str,
                 width: float = 1.0, opacity: float = 1.0, dashed: bool = False):
        if len(points) < 2:
            return
        pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (self._map(x, y) for x, y in points))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self._parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_fmt(width)}" stroke-opacity="{_fmt(opacity)}"{dash}/>'
        )

    def circle(self, x: float, y: float, r_px: float, fill: str):
        px, py = self._map(x, y)
        self._parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(r_px)}" fill="{fill}"/>'
        )

    def star(self, x: float, y: float, size_px: float = 8.0, fill: str = "gold",
             stroke: str = "black"):
        cx, cy = self._map(x, y)
        pts = []
        for i in range(10):
            r = size_px if i % 2 == 0 else 0.45 * size_px
            a = -0.5 * math.pi + i * math.pi / 5.0
            pts.append(f"{_fmt(cx + r * math.cos(a))},{_fmt(cy + r * math.sin(a))}")
        self._parts.append(
            f'<polygon points="{" ".join(pts)}" fill="{fill}" stroke="{stroke}" stroke-width="1"/>'
        )

    def text(self, x_px: float, y_px: float, content: str, size: int = 13):
        self._parts.append(
            f'<text x="{_fmt(x_px)}" y="{_fmt(y_px)}" font-family="sans-serif" '
            f'font-size="{size}">{content}</text>'
        )

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">'
        )
        bg = f'<rect width="{self.width}" height="{self.height}" fill="white"/>'
        return "\n".join([head, bg, *self._parts, "</svg>"]) + "\n"
