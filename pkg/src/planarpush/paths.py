"""Desired paths built from line segments and circular arcs, plus the
closest-point (Frenet frame) projection used by the control laws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .geometry import Vec2, wrap_angle

_JOIN_TOL = 1e-9


@dataclass(frozen=True)
class Line:
    start: Vec2
    end: Vec2

    @property
    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])

    @property
    def tangent(self) -> Vec2:
        l = self.length
        return ((self.end[0] - self.start[0]) / l, (self.end[1] - self.start[1]) / l)

    def point_at(self, s: float) -> Vec2:
        tx, ty = self.tangent
        return (self.start[0] + s * tx, self.start[1] + s * ty)

    def tangent_angle_at(self, s: float) -> float:
        tx, ty = self.tangent
        return math.atan2(ty, tx)


@dataclass(frozen=True)
class Arc:
    center: Vec2
    radius: float
    start_angle: float
    sweep: float  # signed; positive turns counterclockwise

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def angle_at(self, s: float) -> float:
        return self.start_angle + math.copysign(s / self.radius, self.sweep)

    def point_at(self, s: float) -> Vec2:
        a = self.angle_at(s)
        return (self.center[0] + self.radius * math.cos(a), self.center[1] + self.radius * math.sin(a))

    def tangent_angle_at(self, s: float) -> float:
        a = self.angle_at(s)
        return wrap_angle(a + math.copysign(0.5 * math.pi, self.sweep))

    @property
    def start(self) -> Vec2:
        return self.point_at(0.0)

    @property
    def end(self) -> Vec2:
        return self.point_at(self.length)


Segment = Union[Line, Arc]


@dataclass(frozen=True)
class FrenetProjection:
    """Closest-point frame on the path: the tangent angle, arc-length station,
    and signed lateral offset (positive on the +90-degree side of the tangent)."""

    point: Vec2
    s: float
    tangent_angle: float
    lateral_offset: float

    @property
    def tangent(self) -> Vec2:
        return (math.cos(self.tangent_angle), math.sin(self.tangent_angle))

    @property
    def normal(self) -> Vec2:
        return (-math.sin(self.tangent_angle), math.cos(self.tangent_angle))


class PathSpec:
    """Ordered, position-continuous chain of lines and arcs.

    Queries past the final endpoint extrapolate along the final tangent, so
    the projected station may exceed the total length.
    """

    def __init__(self, segments: Sequence[Segment]):
        segments = tuple(segments)
        if not segments:
            raise ValueError("path needs at least one segment")
        cum = [0.0]
        for i, seg in enumerate(segments):
            if seg.length <= 0.0:
                raise ValueError("path segment must have positive length")
            cum.append(cum[-1] + seg.length)
            if i > 0:
                px, py = _segment_start(seg)
                qx, qy = _segment_end(segments[i - 1])
                if math.hypot(px - qx, py - qy) > _JOIN_TOL:
                    raise ValueError("path segments must be position-continuous")
        self.segments = segments
        self._cum = tuple(cum)

    @property
    def length(self) -> float:
        return self._cum[-1]

    def point_at(self, s: float) -> Vec2:
        seg, s_local, s0 = self._locate(s)
        if s_local > seg.length:
            # extrapolate along the final tangent
            ex, ey = _segment_end(seg)
            ta = seg.tangent_angle_at(seg.length)
            over = s_local - seg.length
            return (ex + over * math.cos(ta), ey + over * math.sin(ta))
        return seg.point_at(s_local)

    def tangent_angle_at(self, s: float) -> float:
        seg, s_local, _ = self._locate(s)
        return seg.tangent_angle_at(min(s_local, seg.length))

    def point_ahead(self, s: float, lookahead: float) -> Vec2:
        if lookahead < 0.0:
            raise ValueError("lookahead must be non-negative")
        return self.point_at(s + lookahead)

    def _locate(self, s: float):
        s = max(s, 0.0)
        cum = self._cum
        for i, seg in enumerate(self.segments):
            if s <= cum[i + 1] or i == len(self.segments) - 1:
                return seg, s - cum[i], cum[i]
        raise AssertionError("unreachable")

    def project(self, query: Sequence[float]) -> FrenetProjection:
        qx, qy = float(query[0]), float(query[1])
        best_d = math.inf
        best: tuple[float, float, float, float] | None = None  # px, py, s, theta
        for i, seg in enumerate(self.segments):
            px, py, s_local, theta = _project_segment(seg, qx, qy)
            d = math.hypot(qx - px, qy - py)
            if d < best_d - 1e-12:  # ties resolve to the smaller station
                best_d = d
                best = (px, py, self._cum[i] + s_local, theta)
        # extension of the final tangent past the path end
        last = self.segments[-1]
        ex, ey = _segment_end(last)
        ta = last.tangent_angle_at(last.length)
        tx, ty = math.cos(ta), math.sin(ta)
        proj = (qx - ex) * tx + (qy - ey) * ty
        if proj > 0.0:
            px, py = ex + proj * tx, ey + proj * ty
            d = math.hypot(qx - px, qy - py)
            if d < best_d - 1e-12:
                best_d = d
                best = (px, py, self.length + proj, ta)
        px, py, s_star, theta = best
        nx, ny = -math.sin(theta), math.cos(theta)
        offset = (qx - px) * nx + (qy - py) * ny
        return FrenetProjection((px, py), s_star, theta, offset)


def _segment_start(seg: Segment) -> Vec2:
    return seg.start if isinstance(seg, Line) else seg.point_at(0.0)


def _segment_end(seg: Segment) -> Vec2:
    return seg.end if isinstance(seg, Line) else seg.point_at(seg.length)


def _project_segment(seg: Segment, qx: float, qy: float):
    """Clamped closest point on one segment: (px, py, s_local, tangent_angle)."""
    if isinstance(seg, Line):
        sx, sy = seg.start
        tx, ty = seg.tangent
        s = (qx - sx) * tx + (qy - sy) * ty
        s = min(max(s, 0.0), seg.length)
        return (sx + s * tx, sy + s * ty, s, math.atan2(ty, tx))
    cx, cy = seg.center
    dx, dy = qx - cx, qy - cy
    if dx == 0.0 and dy == 0.0:
        s = 0.0  # center query ties resolve to the arc start
    else:
        psi = math.atan2(dy, dx)
        rel = wrap_angle(psi - seg.start_angle)
        if seg.sweep >= 0.0:
            if rel < 0.0:
                rel += 2.0 * math.pi
            u = rel / seg.sweep
        else:
            if rel > 0.0:
                rel -= 2.0 * math.pi
            u = rel / seg.sweep
        if u <= 0.0:
            s = 0.0
        elif u >= 1.0:
            # outside the swept range: nearer endpoint wins, start on ties
            a0x, a0y = seg.point_at(0.0)
            a1x, a1y = seg.point_at(seg.length)
            d0 = math.hypot(qx - a0x, qy - a0y)
            d1 = math.hypot(qx - a1x, qy - a1y)
            s = 0.0 if d0 <= d1 else seg.length
        else:
            s = u * seg.length
    px, py = seg.point_at(s)
    return (px, py, s, seg.tangent_angle_at(s))


def straight_path(length: float = 6.0) -> PathSpec:
    """Straight run along +x from the origin."""
    return PathSpec((Line((0.0, 0.0), (length, 0.0)),))


def corner_path(lead_in: float = 3.0, radius: float = 2.0, exit: float = 3.0) -> PathSpec:
    """Straight lead-in along +x, a quarter turn to the left, then a straight
    exit along +y."""
    return PathSpec(
        (
            Line((0.0, 0.0), (lead_in, 0.0)),
            Arc((lead_in, radius), radius, -0.5 * math.pi, 0.5 * math.pi),
            Line((lead_in + radius, radius), (lead_in + radius, radius + exit)),
        )
    )
