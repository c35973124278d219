"""First-principles quasistatic pushing engine.

The slider rests on a frictional floor whose reaction is modeled by an
ellipsoidal limit surface; it moves only while the applied contact wrench
reaches that surface, and then along the surface normal (the flow rule).
Pusher and wall contacts are penalty-based (spring-damper normal force with
regularized Coulomb friction). The twist magnitude is set so the slider's
contact point recedes at the pusher's normal approach speed, which keeps the
penetration bounded.

The per-substep arithmetic lives in one kernel (numba-compiled when
available) shared by the functional :func:`step` and the batch
:class:`PushSimulation` driver, so both produce bit-identical trajectories.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import Disk, Polygon, Pose2, Shape, Vec2

GRAVITY = 9.81

PRESSURE_VARIANTS = ("centered", "uniform", "perimeter")


class EngineDivergence(RuntimeError):
    """Raised when the integration produces a non-finite state."""


@dataclass(frozen=True)
class LimitSurface:
    """Ellipsoidal bound on the support-friction wrench: translational limit
    ``max_force`` (N) and torque limit ``max_torque`` (N*m) about the CoM."""

    max_force: float
    max_torque: float

    def __post_init__(self):
        if not (self.max_force > 0.0 and self.max_torque > 0.0):
            raise ValueError("limit surface extents must be positive")


def _mean_radius_uniform_polygon(poly: Polygon) -> float:
    """Area-averaged distance from the centroid, by exact polar integration of
    each centroid-fan triangle (closed form of the sec^3 integral)."""
    cx, cy = poly.centroid
    verts = [(v[0] - cx, v[1] - cy) for v in poly.vertices]
    n = len(verts)
    total = 0.0
    area = 0.0
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        cross = ax * by - ay * bx
        area += 0.5 * cross
        ex, ey = bx - ax, by - ay
        el = math.hypot(ex, ey)
        # distance from origin to the edge line and foot direction
        d = cross / el
        if d <= 0.0:
            raise ValueError("centroid must lie strictly inside the polygon")
        fx, fy = ey / el, -ex / el  # outward edge normal: direction of the perpendicular foot
        foot = math.atan2(fy, fx)
        psi_a = math.atan2(ay, ax) - foot
        psi_b = math.atan2(by, bx) - foot
        # unwrap into (-pi/2, pi/2) around the foot direction
        while psi_a <= -math.pi:
            psi_a += 2.0 * math.pi
        while psi_a > math.pi:
            psi_a -= 2.0 * math.pi
        while psi_b <= -math.pi:
            psi_b += 2.0 * math.pi
        while psi_b > math.pi:
            psi_b -= 2.0 * math.pi

        def antideriv(psi: float) -> float:
            sec = 1.0 / math.cos(psi)
            tan = math.tan(psi)
            return 0.5 * (sec * tan + math.log(sec + tan))

        total += (d ** 3 / 3.0) * (antideriv(psi_b) - antideriv(psi_a))
    return total / area


def limit_surface_for(shape: Shape, mass: float, support_friction: float,
                      pressure_variant: str = "uniform") -> LimitSurface:
    """Limit surface from the support pressure distribution.

    ``uniform`` spreads the weight over the footprint, ``perimeter``
    concentrates it on the rim (disk) or the vertices (polygon), and
    ``centered`` narrows the torque arm to half the uniform value.
    """
    if not mass > 0.0:
        raise ValueError("mass must be positive")
    if not support_friction > 0.0:
        raise ValueError("support friction must be positive")
    f_max = support_friction * mass * GRAVITY
    if isinstance(shape, Disk):
        if pressure_variant == "uniform":
            r_bar = 2.0 * shape.radius / 3.0
        elif pressure_variant == "perimeter":
            r_bar = shape.radius
        elif pressure_variant == "centered":
            r_bar = shape.radius / 3.0
        else:
            raise ValueError(f"unknown pressure variant {pressure_variant!r}")
    elif isinstance(shape, Polygon):
        if pressure_variant == "uniform":
            r_bar = _mean_radius_uniform_polygon(shape)
        elif pressure_variant == "perimeter":
            cx, cy = shape.centroid
            r_bar = sum(math.hypot(v[0] - cx, v[1] - cy) for v in shape.vertices) / len(shape.vertices)
        elif pressure_variant == "centered":
            r_bar = 0.5 * _mean_radius_uniform_polygon(shape)
        else:
            raise ValueError(f"unknown pressure variant {pressure_variant!r}")
    else:
        raise ValueError(f"unsupported shape {type(shape).__name__}")
    return LimitSurface(max_force=f_max, max_torque=f_max * r_bar)


@dataclass(frozen=True)
class SliderModel:
    """Pushed object: footprint shape (origin at the centroid), mass, CoM
    offset in the body frame, pusher-contact friction, and support limit
    surface."""

    shape: Shape
    mass: float
    com_offset: Vec2
    contact_friction: float
    limit_surface: LimitSurface

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError("mass must be positive")
        if self.contact_friction < 0.0:
            raise ValueError("contact friction must be non-negative")
        object.__setattr__(self, "com_offset", (float(self.com_offset[0]), float(self.com_offset[1])))
        if isinstance(self.shape, Disk):
            inside = math.hypot(*self.com_offset) < self.shape.radius
        else:
            from .geometry import _closest_point_polygon_body

            inside = _closest_point_polygon_body(self.shape, *self.com_offset)[4] < 0.0
        if not inside:
            raise ValueError("center of mass must lie inside the shape")


@dataclass(frozen=True)
class ContactParams:
    """Penalty contact constants shared by the pusher and wall contacts."""

    stiffness: float = 1.0e4              # N/m
    damping: float = 1.0e2                # N*s/m
    regularization_velocity: float = 1e-3  # m/s; Coulomb saturation speed
    pusher_radius: float = 0.05           # m
    wall_friction: float = 0.25

    def __post_init__(self):
        if not (self.stiffness > 0.0 and self.damping > 0.0
                and self.regularization_velocity > 0.0 and self.pusher_radius > 0.0):
            raise ValueError("contact parameters must be positive")
        if self.wall_friction < 0.0:
            raise ValueError("wall friction must be non-negative")


@dataclass(frozen=True)
class WorldState:
    """Snapshot of the scene: slider pose, pusher sphere center, static walls,
    clock, and the force the pusher currently applies on the slider."""

    slider_pose: Pose2
    pusher_position: Vec2
    walls: tuple = ()
    time: float = 0.0
    measured_force: Vec2 = (0.0, 0.0)
    slider_twist: tuple[float, float, float] = (0.0, 0.0, 0.0)
    contact_point: Optional[Vec2] = None
    net_wrench: tuple[float, float, float] = (0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# substep kernel
# ---------------------------------------------------------------------------

# state-vector slots
_SX, _SY, _STH = 0, 1, 2
_PX, _PY = 3, 4
_TVX, _TVY, _TOM = 5, 6, 7
_FX, _FY = 8, 9
_CPX, _CPY = 10, 11
_CONTACT = 12
_NFORCE = 13
_SLIP = 14
_WFX, _WFY, _WTAU = 15, 16, 17
_H = 18
_TIME = 19
_MON_CONE = 20
_MON_POWER = 21
_MON_REST = 22
_MON_NOFORCE = 23
_NONFINITE = 24
_WALLN = 25
_MON_WALLPEN = 26
_MON_PUSHPEN = 27
_NSLOTS = 28


def _substeps_impl(S, shape_kind, verts, radius, comx, comy, walls,
                   kp, kd, eps_v, mu_c, mu_wall, pusher_r, fmax, tmax,
                   ux, uy, dt, nsub):
    fmax2 = fmax * fmax
    tmax2 = tmax * tmax
    nverts = verts.shape[0]
    nwalls = walls.shape[0]
    for _ in range(nsub):
        S[_PX] += ux * dt
        S[_PY] += uy * dt
        sx = S[_SX]
        sy = S[_SY]
        sth = S[_STH]
        px = S[_PX]
        py = S[_PY]
        tvx = S[_TVX]
        tvy = S[_TVY]
        tom = S[_TOM]
        c = math.cos(sth)
        s = math.sin(sth)
        comwx = sx + c * comx - s * comy
        comwy = sy + s * comx + c * comy

        # --- pusher sphere vs slider -----------------------------------
        if shape_kind == 0:
            dx = px - sx
            dy = py - sy
            d = math.hypot(dx, dy)
            if d == 0.0:
                nx = c
                ny = s
            else:
                nx = dx / d
                ny = dy / d
            sd = d - radius
            cpx = sx + radius * nx
            cpy = sy + radius * ny
        else:
            qbx = c * (px - sx) + s * (py - sy)
            qby = -s * (px - sx) + c * (py - sy)
            best_d2 = 1e300
            bpx = 0.0
            bpy = 0.0
            bi = 0
            bt = 0.0
            inside = True
            for i in range(nverts):
                ax = verts[i, 0]
                ay = verts[i, 1]
                j = i + 1
                if j == nverts:
                    j = 0
                bx = verts[j, 0]
                by = verts[j, 1]
                ex = bx - ax
                ey = by - ay
                if ex * (qby - ay) - ey * (qbx - ax) < 0.0:
                    inside = False
                t = ((qbx - ax) * ex + (qby - ay) * ey) / (ex * ex + ey * ey)
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
                cx_ = ax + t * ex
                cy_ = ay + t * ey
                d2 = (qbx - cx_) ** 2 + (qby - cy_) ** 2
                if d2 < best_d2:
                    best_d2 = d2
                    bpx = cx_
                    bpy = cy_
                    bi = i
                    bt = t
            ax = verts[bi, 0]
            ay = verts[bi, 1]
            j = bi + 1
            if j == nverts:
                j = 0
            bx = verts[j, 0]
            by = verts[j, 1]
            el = math.hypot(bx - ax, by - ay)
            nbx = (by - ay) / el
            nby = -(bx - ax) / el
            d = math.sqrt(best_d2)
            if inside:
                sd = -d
            else:
                sd = d
                if not (0.0 < bt < 1.0) and d > 0.0:
                    nbx = (qbx - bpx) / d
                    nby = (qby - bpy) / d
            cpx = sx + c * bpx - s * bpy
            cpy = sy + s * bpx + c * bpy
            nx = c * nbx - s * nby
            ny = s * nbx + c * nby

        pen = pusher_r - sd
        slip = 0.0
        contact = 0.0
        # wall wrench accumulator (forces independent of the pusher normal)
        awx = 0.0
        awy = 0.0
        awtau = 0.0
        # pusher wrench per unit normal force: direction (normal + regularized
        # friction) and its torque lever
        bfx = 0.0
        bfy = 0.0
        btau = 0.0
        n_rest = 0.0
        n_spring = 0.0
        un = 0.0
        ninx = 0.0
        niny = 0.0
        sat = 0.0
        if pen > 0.0:
            contact = 1.0
            if pen > S[_MON_PUSHPEN]:
                S[_MON_PUSHPEN] = pen
            ninx = -nx
            niny = -ny
            vcx = tvx - tom * (cpy - comwy)
            vcy = tvy + tom * (cpx - comwx)
            un = ninx * ux + niny * uy
            n_spring = kp * pen
            # normal force if the slider rests this substep (full approach rate)
            n_rest = n_spring + kd * un
            if n_rest < 0.0:
                n_rest = 0.0
            tx = -niny
            ty = ninx
            slip = tx * (ux - vcx) + ty * (uy - vcy)
            sat = slip / eps_v
            if sat > 1.0:
                sat = 1.0
            elif sat < -1.0:
                sat = -1.0
            bfx = ninx + mu_c * sat * tx
            bfy = niny + mu_c * sat * ty
            btau = (cpx - comwx) * bfy - (cpy - comwy) * bfx

        # --- walls ------------------------------------------------------
        wall_hits = 0.0
        for w in range(nwalls):
            wax = walls[w, 0]
            way = walls[w, 1]
            wbx = walls[w, 2]
            wby = walls[w, 3]
            wex = wbx - wax
            wey = wby - way
            wlen = math.hypot(wex, wey)
            wtx = wex / wlen
            wty = wey / wlen
            # wall normal toward the slider origin
            lnx = -wty
            lny = wtx
            if (sx - wax) * lnx + (sy - way) * lny < 0.0:
                lnx = -lnx
                lny = -lny
            # gather up to two contacts (the extreme-span penetrating vertices)
            t_first = -1.0
            for k in range(2):
                qx = 0.0
                qy = 0.0
                pw = -1.0
                if shape_kind == 0:
                    if k == 1:
                        break
                    t = (sx - wax) * wtx + (sy - way) * wty
                    if t < 0.0:
                        t = 0.0
                    elif t > wlen:
                        t = wlen
                    qx = wax + t * wtx
                    qy = way + t * wty
                    ddx = sx - qx
                    ddy = sy - qy
                    dd = math.hypot(ddx, ddy)
                    pw = radius - dd
                    if pw < 0.0:
                        continue
                    if dd > 0.0:
                        lnx = ddx / dd
                        lny = ddy / dd
                else:
                    best_t = 0.0
                    found = False
                    best_pos = 1e300 if k == 0 else -1e300
                    for i in range(nverts):
                        vx_ = verts[i, 0]
                        vy_ = verts[i, 1]
                        wx = sx + c * vx_ - s * vy_
                        wy = sy + s * vx_ + c * vy_
                        h = (wx - wax) * lnx + (wy - way) * lny
                        if h > 0.0:
                            continue
                        t = (wx - wax) * wtx + (wy - way) * wty
                        if t < 0.0 or t > wlen:
                            continue
                        if (k == 0 and t < best_pos) or (k == 1 and t > best_pos):
                            best_pos = t
                            best_t = t
                            pw = -h
                            found = True
                    if not found:
                        continue
                    if k == 1 and best_t == t_first:
                        continue  # only one penetrating vertex
                    if k == 0:
                        t_first = best_t
                    qx = wax + best_t * wtx
                    qy = way + best_t * wty
                if pw < 0.0:
                    continue
                wall_hits += 1.0
                if pw > S[_MON_WALLPEN]:
                    S[_MON_WALLPEN] = pw
                vqx = tvx - tom * (qy - comwy)
                vqy = tvy + tom * (qx - comwx)
                apprw = -(lnx * vqx + lny * vqy)
                nw = kp * pw + kd * apprw
                if nw < 0.0:
                    nw = 0.0
                twx = -lny
                twy = lnx
                vt = twx * vqx + twy * vqy
                satw = vt / eps_v
                if satw > 1.0:
                    satw = 1.0
                elif satw < -1.0:
                    satw = -1.0
                ftw = -mu_wall * nw * satw
                fxw = nw * lnx + ftw * twx
                fyw = nw * lny + ftw * twy
                awx += fxw
                awy += fyw
                awtau += (qx - comwx) * fyw - (qy - comwy) * fxw

        # --- limit-surface flow rule with contact complementarity ---------
        # Rest hypothesis: slider static, full approach-rate damping at the
        # pusher. If that wrench stays inside the limit surface the slider
        # rests; otherwise it slides and the pusher normal force is solved so
        # the total wrench lies exactly on the surface (quasistatic sliding),
        # which makes the penetration relax with time constant damping/stiffness.
        nforce = n_rest
        wfx = awx + nforce * bfx
        wfy = awy + nforce * bfy
        wtau = awtau + nforce * btau
        h_val = (wfx * wfx + wfy * wfy) / fmax2 + (wtau * wtau) / tmax2
        nvx = 0.0
        nvy = 0.0
        nom = 0.0
        if h_val > 1.0 and contact > 0.0:
            # H(N) = A N^2 + B N + C along the pusher-force ray
            qa = (bfx * bfx + bfy * bfy) / fmax2 + (btau * btau) / tmax2
            qb = 2.0 * ((awx * bfx + awy * bfy) / fmax2 + (awtau * btau) / tmax2)
            qc = (awx * awx + awy * awy) / fmax2 + (awtau * awtau) / tmax2
            disc = qb * qb - 4.0 * qa * (qc - 1.0)
            slide = False
            if disc >= 0.0 and qa > 0.0:
                n_star = (-qb + math.sqrt(disc)) / (2.0 * qa)
                if 0.0 <= n_star <= n_rest:
                    dvx = (awx + n_star * bfx) / fmax2
                    dvy = (awy + n_star * bfy) / fmax2
                    dom = (awtau + n_star * btau) / tmax2
                    vcn = (ninx * (dvx - dom * (cpy - comwy))
                           + niny * (dvy + dom * (cpx - comwx)))
                    recede = un - (n_star - n_spring) / kd
                    if vcn > 0.0 and recede > 0.0:
                        slide = True
                        scale = recede / vcn
                        nvx = scale * dvx
                        nvy = scale * dvy
                        nom = scale * dom
                        nforce = n_star
                        wfx = awx + n_star * bfx
                        wfy = awy + n_star * bfy
                        wtau = awtau + n_star * btau
                        h_val = (wfx * wfx + wfy * wfy) / fmax2 + (wtau * wtau) / tmax2
            # wall-dominated wrench or inconsistent recession: stay at rest
            # with the rest-hypothesis forces
        fpx = nforce * bfx
        fpy = nforce * bfy
        if contact > 0.0:
            excess = abs(mu_c * nforce * sat) - mu_c * nforce
            if excess > S[_MON_CONE]:
                S[_MON_CONE] = excess
        power = wfx * nvx + wfy * nvy + wtau * nom
        if power < S[_MON_POWER]:
            S[_MON_POWER] = power
        speed = math.sqrt(nvx * nvx + nvy * nvy) + abs(nom)
        if h_val < 1.0 - 1e-12 and speed > S[_MON_REST]:
            S[_MON_REST] = speed
        if fpx == 0.0 and fpy == 0.0 and speed > S[_MON_NOFORCE]:
            S[_MON_NOFORCE] = speed

        if speed > 0.0:
            ncx = comwx + nvx * dt
            ncy = comwy + nvy * dt
            dth = nom * dt
            cd = math.cos(dth)
            sd_ = math.sin(dth)
            rx = sx - comwx
            ry = sy - comwy
            sx = ncx + cd * rx - sd_ * ry
            sy = ncy + sd_ * rx + cd * ry
            sth = sth + dth
            if sth > math.pi:
                sth -= 2.0 * math.pi
            elif sth <= -math.pi:
                sth += 2.0 * math.pi

        S[_SX] = sx
        S[_SY] = sy
        S[_STH] = sth
        S[_TVX] = nvx
        S[_TVY] = nvy
        S[_TOM] = nom
        S[_FX] = fpx
        S[_FY] = fpy
        S[_CPX] = cpx
        S[_CPY] = cpy
        S[_CONTACT] = contact
        S[_NFORCE] = nforce
        S[_SLIP] = slip
        S[_WFX] = wfx
        S[_WFY] = wfy
        S[_WTAU] = wtau
        S[_H] = h_val
        S[_WALLN] = wall_hits
        S[_TIME] += dt
        if not (math.isfinite(sx) and math.isfinite(sy) and math.isfinite(sth)
                and math.isfinite(fpx) and math.isfinite(fpy)):
            S[_NONFINITE] = 1.0
            return


if os.environ.get("PLANARPUSH_NO_JIT"):
    _substeps = _substeps_impl
else:
    try:
        from numba import njit

        _substeps = njit(cache=True, fastmath=False)(_substeps_impl)
    except ImportError:  # pragma: no cover
        _substeps = _substeps_impl


class PushSimulation:
    """Mutable batch driver around the substep kernel.

    Keeps state in a flat float array so long sweeps avoid per-step object
    construction; :meth:`snapshot` materializes the current
    :class:`WorldState`.
    """

    def __init__(self, world: WorldState, slider: SliderModel, params: ContactParams):
        self.slider = slider
        self.params = params
        self.walls = tuple(
            ((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))) for a, b in world.walls
        )
        shape = slider.shape
        if isinstance(shape, Disk):
            self._kind = 0
            self._verts = np.zeros((1, 2))
            self._radius = shape.radius
        else:
            self._kind = 1
            self._verts = np.array(shape.vertices, dtype=np.float64)
            self._radius = 0.0
        self._walls_arr = (
            np.array([[a[0], a[1], b[0], b[1]] for a, b in self.walls], dtype=np.float64)
            if self.walls
            else np.zeros((0, 4))
        )
        S = np.zeros(_NSLOTS)
        S[_SX] = world.slider_pose.x
        S[_SY] = world.slider_pose.y
        S[_STH] = world.slider_pose.theta
        S[_PX], S[_PY] = world.pusher_position
        S[_TVX], S[_TVY], S[_TOM] = world.slider_twist
        S[_FX], S[_FY] = world.measured_force
        S[_TIME] = world.time
        S[_MON_POWER] = 0.0
        self._S = S

    def advance(self, pusher_velocity: Sequence[float], dt: float, substeps: int = 1) -> None:
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        p = self.params
        ls = self.slider.limit_surface
        _substeps(
            self._S,
            self._kind,
            self._verts,
            self._radius,
            self.slider.com_offset[0],
            self.slider.com_offset[1],
            self._walls_arr,
            p.stiffness,
            p.damping,
            p.regularization_velocity,
            self.slider.contact_friction,
            p.wall_friction,
            p.pusher_radius,
            ls.max_force,
            ls.max_torque,
            float(pusher_velocity[0]),
            float(pusher_velocity[1]),
            dt,
            substeps,
        )
        if self._S[_NONFINITE] != 0.0:
            raise EngineDivergence(
                f"non-finite state at t={self._S[_TIME]:.6f}s "
                f"(slider=({self._S[_SX]}, {self._S[_SY]}, {self._S[_STH]}))"
            )

    # -- read access -------------------------------------------------------

    @property
    def time(self) -> float:
        return float(self._S[_TIME])

    @property
    def slider_pose(self) -> Pose2:
        return Pose2(float(self._S[_SX]), float(self._S[_SY]), float(self._S[_STH]))

    @property
    def pusher_position(self) -> Vec2:
        return (float(self._S[_PX]), float(self._S[_PY]))

    @property
    def measured_force(self) -> Vec2:
        return (float(self._S[_FX]), float(self._S[_FY]))

    @property
    def slider_twist(self) -> tuple[float, float, float]:
        return (float(self._S[_TVX]), float(self._S[_TVY]), float(self._S[_TOM]))

    @property
    def in_contact(self) -> bool:
        return self._S[_CONTACT] > 0.0

    @property
    def contact_point(self) -> Optional[Vec2]:
        if self._S[_CONTACT] > 0.0:
            return (float(self._S[_CPX]), float(self._S[_CPY]))
        return None

    @property
    def contact_normal_force(self) -> float:
        return float(self._S[_NFORCE])

    @property
    def contact_slip_velocity(self) -> float:
        return float(self._S[_SLIP])

    @property
    def net_wrench(self) -> tuple[float, float, float]:
        return (float(self._S[_WFX]), float(self._S[_WFY]), float(self._S[_WTAU]))

    @property
    def limit_surface_value(self) -> float:
        return float(self._S[_H])

    @property
    def monitors(self) -> dict:
        return {
            "max_cone_excess": float(self._S[_MON_CONE]),
            "min_power": float(self._S[_MON_POWER]),
            "max_rest_speed": float(self._S[_MON_REST]),
            "max_unforced_speed": float(self._S[_MON_NOFORCE]),
            "max_wall_penetration": float(self._S[_MON_WALLPEN]),
            "max_pusher_penetration": float(self._S[_MON_PUSHPEN]),
        }

    def snapshot(self) -> WorldState:
        return WorldState(
            slider_pose=self.slider_pose,
            pusher_position=self.pusher_position,
            walls=self.walls,
            time=self.time,
            measured_force=self.measured_force,
            slider_twist=self.slider_twist,
            contact_point=self.contact_point,
            net_wrench=self.net_wrench,
        )


def step(world: WorldState, slider: SliderModel, params: ContactParams,
         pusher_velocity: Sequence[float], dt: float) -> WorldState:
    """Advance the world by one timestep under a constant pusher velocity.

    Pure function: builds a simulation from the state, runs one substep, and
    returns the resulting state.
    """
    sim = PushSimulation(world, slider, params)
    sim.advance(pusher_velocity, dt, 1)
    return sim.snapshot()
