"""Planar geometry primitives: angles, poses, convex shapes, and contact queries.

Everything works on plain floats and (x, y) tuples so the hot simulation loop
does not pay numpy per-call overhead; numpy arrays are accepted anywhere a
point is expected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

TAU = 2.0 * math.pi

Vec2 = tuple[float, float]


def wrap_angle(raw: float) -> float:
    """Wrap an angle in radians to the half-open interval (-pi, pi].

    The boundary maps -pi to +pi so every direction has a unique value.
    """
    w = math.fmod(raw + math.pi, TAU)
    if w <= 0.0:
        w += TAU
    return w - math.pi


def angle_of(x: float, y: float) -> float:
    return math.atan2(y, x)


def unit(x: float, y: float) -> Vec2:
    n = math.hypot(x, y)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return (x / n, y / n)


def rot90(x: float, y: float) -> Vec2:
    """Rotate a vector by +90 degrees (counterclockwise)."""
    return (-y, x)


@dataclass(frozen=True)
class Pose2:
    """Planar rigid transform: position (x, y) in meters, orientation in radians."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError("pose components must be finite")

    @property
    def position(self) -> Vec2:
        return (self.x, self.y)

    def rotate(self, v: Sequence[float]) -> Vec2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (c * v[0] - s * v[1], s * v[0] + c * v[1])

    def transform(self, p: Sequence[float]) -> Vec2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (self.x + c * p[0] - s * p[1], self.y + s * p[0] + c * p[1])

    def inverse_rotate(self, v: Sequence[float]) -> Vec2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (c * v[0] + s * v[1], -s * v[0] + c * v[1])

    def inverse_transform(self, p: Sequence[float]) -> Vec2:
        dx, dy = p[0] - self.x, p[1] - self.y
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (c * dx + s * dy, -s * dx + c * dy)


@dataclass(frozen=True)
class Disk:
    """Disk of given radius, centered on the body-frame origin."""

    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError("disk radius must be positive and finite")

    @property
    def perimeter(self) -> float:
        return TAU * self.radius


@dataclass(frozen=True)
class Polygon:
    """Convex polygon, vertices in counterclockwise order in the body frame."""

    vertices: tuple[Vec2, ...]

    def __post_init__(self):
        verts = tuple((float(v[0]), float(v[1])) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for i in range(n):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % n]
            cx, cy = verts[(i + 2) % n]
            if math.hypot(bx - ax, by - ay) < 1e-12:
                raise ValueError("repeated polygon vertices")
            cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
            if cross <= 0.0:
                raise ValueError("polygon must be strictly convex with CCW winding")

    @property
    def perimeter(self) -> float:
        verts = self.vertices
        n = len(verts)
        return sum(
            math.hypot(verts[(i + 1) % n][0] - verts[i][0], verts[(i + 1) % n][1] - verts[i][1])
            for i in range(n)
        )

    @property
    def centroid(self) -> Vec2:
        # area-weighted centroid of the convex polygon
        verts = self.vertices
        n = len(verts)
        a2 = 0.0
        cx = cy = 0.0
        for i in range(n):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % n]
            w = x0 * y1 - x1 * y0
            a2 += w
            cx += (x0 + x1) * w
            cy += (y0 + y1) * w
        return (cx / (3.0 * a2), cy / (3.0 * a2))


def box(side: float) -> Polygon:
    h = 0.5 * side
    return Polygon(((h, -h), (h, h), (-h, h), (-h, -h)))


Shape = Union[Disk, Polygon]


def _closest_point_polygon_body(poly: Polygon, qx: float, qy: float):
    """Closest boundary point in the body frame.

    Returns (px, py, nx, ny, signed_distance). The normal at a vertex points
    from the vertex toward the query so a sphere rolling around a corner sees
    a continuous direction; on an edge it is the edge's outward normal.
    """
    verts = poly.vertices
    n = len(verts)
    best_d2 = math.inf
    best = None  # (px, py, edge_index, t)
    inside = True
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        if ex * (qy - ay) - ey * (qx - ax) < 0.0:  # right of a CCW edge: outside
            inside = False
        t = ((qx - ax) * ex + (qy - ay) * ey) / (ex * ex + ey * ey)
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        px, py = ax + t * ex, ay + t * ey
        d2 = (qx - px) ** 2 + (qy - py) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best = (px, py, i, t)
    px, py, i, t = best
    ax, ay = verts[i]
    bx, by = verts[(i + 1) % n]
    el = math.hypot(bx - ax, by - ay)
    edge_nx, edge_ny = (by - ay) / el, -(bx - ax) / el  # outward for CCW winding
    d = math.sqrt(best_d2)
    if inside:
        return (px, py, edge_nx, edge_ny, -d)
    if 0.0 < t < 1.0 or d == 0.0:
        return (px, py, edge_nx, edge_ny, d)
    # vertex region: smooth (query - vertex) normal
    return (px, py, (qx - px) / d, (qy - py) / d, d)


def closest_point_on_shape(shape: Shape, pose: Pose2, query: Sequence[float]):
    """Closest boundary point of a posed shape to a world-frame query point.

    Returns (point, outward_normal, signed_distance); the distance is negative
    iff the query lies inside the shape.
    """
    qx, qy = float(query[0]), float(query[1])
    if isinstance(shape, Disk):
        dx, dy = qx - pose.x, qy - pose.y
        d = math.hypot(dx, dy)
        if d == 0.0:
            nx, ny = pose.rotate((1.0, 0.0))
        else:
            nx, ny = dx / d, dy / d
        r = shape.radius
        return ((pose.x + r * nx, pose.y + r * ny), (nx, ny), d - r)
    bx, by = pose.inverse_transform((qx, qy))
    px, py, nx, ny, sd = _closest_point_polygon_body(shape, bx, by)
    return (pose.transform((px, py)), pose.rotate((nx, ny)), sd)


def segment_shape_contacts(shape: Shape, pose: Pose2, wall: Sequence[Sequence[float]]):
    """Contacts between a posed shape and a wall segment.

    Returns a list of (point, push_normal, penetration) with penetration >= 0;
    the normal is the unit direction that separates the shape from the wall
    (the direction a reaction force on the shape acts along). Disks and
    penetrating polygon vertices give one contact each; a polygon edge lying
    flush on the wall gives the two overlap endpoints.
    """
    (ax, ay), (bx, by) = (float(wall[0][0]), float(wall[0][1])), (float(wall[1][0]), float(wall[1][1]))
    ex, ey = bx - ax, by - ay
    seg_len = math.hypot(ex, ey)
    if seg_len <= 0.0:
        raise ValueError("wall segment must have positive length")
    tx, ty = ex / seg_len, ey / seg_len
    lx, ly = -ty, tx  # left normal of the segment

    if isinstance(shape, Disk):
        t = (pose.x - ax) * tx + (pose.y - ay) * ty
        t = min(max(t, 0.0), seg_len)
        px, py = ax + t * tx, ay + t * ty
        dx, dy = pose.x - px, pose.y - py
        d = math.hypot(dx, dy)
        pen = shape.radius - d
        if pen < 0.0:
            return []
        if d == 0.0:
            nx, ny = lx, ly
        else:
            nx, ny = dx / d, dy / d
        return [((px, py), (nx, ny), pen)]

    cx, cy = shape.centroid
    ccx, ccy = pose.transform((cx, cy))
    side = (ccx - ax) * lx + (ccy - ay) * ly
    if side >= 0.0:
        nx, ny = lx, ly
    else:
        nx, ny = -lx, -ly

    contacts = []
    for v in shape.vertices:
        wx, wy = pose.transform(v)
        h = (wx - ax) * nx + (wy - ay) * ny
        if h > 0.0:
            continue
        t = (wx - ax) * tx + (wy - ay) * ty
        if t < 0.0 or t > seg_len:
            continue
        contacts.append(((ax + t * tx, ay + t * ty), (nx, ny), -h, t))
    if not contacts:
        # wall endpoint poking into the polygon interior
        out = []
        for qx, qy in ((ax, ay), (bx, by)):
            _, _, sd = closest_point_on_shape(shape, pose, (qx, qy))
            if sd <= 0.0:
                out.append(((qx, qy), (nx, ny), -sd))
        return out
    if len(contacts) > 2:
        contacts.sort(key=lambda c: c[3])
        contacts = [contacts[0], contacts[-1]]
    return [(p, nrm, pen) for (p, nrm, pen, _) in contacts]


def contact_offset_to_point(shape: Shape, alpha: float):
    """Body-frame boundary point at arc length ``alpha`` from the pushing
    reference point, with its outward normal.

    The reference point is the midpoint of the polygon edge facing -x (the
    trailing edge of a box), or the body-frame angle pi on a disk. Positive
    offsets advance toward +y on the trailing edge of a polygon and advance
    counterclockwise on a disk.
    """
    if isinstance(shape, Disk):
        if abs(alpha) >= 0.5 * shape.perimeter:
            raise ValueError("contact offset exceeds half the perimeter")
        ang = math.pi + alpha / shape.radius
        return (
            (shape.radius * math.cos(ang), shape.radius * math.sin(ang)),
            (math.cos(ang), math.sin(ang)),
        )
    if abs(alpha) >= 0.5 * shape.perimeter:
        raise ValueError("contact offset exceeds half the perimeter")
    verts = shape.vertices
    n = len(verts)
    # trailing edge: outward normal closest to -x
    best_i, best_dot = 0, math.inf
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        el = math.hypot(bx - ax, by - ay)
        nx = (by - ay) / el
        if nx < best_dot:
            best_dot = nx
            best_i = i
    ax, ay = verts[best_i]
    bx, by = verts[(best_i + 1) % n]
    sx, sy = 0.5 * (ax + bx), 0.5 * (ay + by)
    # walk direction along the trailing edge whose y-component is positive
    el = math.hypot(bx - ax, by - ay)
    dx, dy = (bx - ax) / el, (by - ay) / el
    forward = 1.0 if (dy > 0.0 or (dy == 0.0 and dx > 0.0)) else -1.0
    # vertex index order consistent with walking `forward` along edge best_i
    remaining = abs(alpha)
    direction = forward if alpha >= 0.0 else -forward
    px, py = sx, sy
    edge = best_i
    # distance from the edge midpoint to the edge end in the walk direction
    if direction > 0.0:
        endx, endy = bx, by
        step_next = 1
    else:
        endx, endy = ax, ay
        step_next = -1
    avail = math.hypot(endx - px, endy - py)
    while remaining > avail:
        remaining -= avail
        px, py = endx, endy
        edge = (edge + step_next) % n
        vax, vay = verts[edge]
        vbx, vby = verts[(edge + 1) % n]
        if step_next > 0:
            endx, endy = vbx, vby
        else:
            endx, endy = vax, vay
        avail = math.hypot(endx - px, endy - py)
    if avail > 0.0:
        ux, uy = (endx - px) / avail, (endy - py) / avail
        px, py = px + remaining * ux, py + remaining * uy
    vax, vay = verts[edge]
    vbx, vby = verts[(edge + 1) % n]
    el = math.hypot(vbx - vax, vby - vay)
    return ((px, py), ((vby - vay) / el, -(vbx - vax) / el))
