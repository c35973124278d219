"""Analytic single-contact quasistatic push solver.

Given a velocity-controlled point pusher on the boundary of a slider whose
support friction is modeled by an ellipsoidal limit surface, solve for the
contact mode (stick / slip / separation), the contact force on the limit
surface, and the slider twist. Serves as the independent reference the
penalty-based engine is checked against.

All vectors share one frame (use the slider body frame and rotate inputs in;
the solution is equivariant under rotation of the whole problem).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ContactMode(enum.Enum):
    STICK = "stick"
    SLIP_POSITIVE = "slip_positive"
    SLIP_NEGATIVE = "slip_negative"
    SEPARATE = "separate"


@dataclass(frozen=True)
class ContactSolution:
    mode: ContactMode
    force: tuple[float, float]          # on the limit surface unless separated
    twist: tuple[float, float, float]   # (vx, vy, omega) of the slider
    degenerate: bool = False            # set when no consistent slip edge exists

    @property
    def is_separated(self) -> bool:
        return self.mode is ContactMode.SEPARATE


def _surface_scale(fx: float, fy: float, tau: float, f_max: float, t_max: float) -> float:
    """Factor that rescales a wrench ray onto the limit surface."""
    h = (fx * fx + fy * fy) / (f_max * f_max) + (tau * tau) / (t_max * t_max)
    return 1.0 / math.sqrt(h)


def solve_contact(slider, contact_point: Sequence[float], inward_normal: Sequence[float],
                  pusher_velocity: Sequence[float], v_scale: float = 1.0) -> ContactSolution:
    """Solve one pushing contact.

    ``contact_point`` is on the slider boundary in the body frame;
    ``inward_normal`` is the unit boundary normal pointing into the slider;
    ``pusher_velocity`` is the velocity of the pushing point in the same
    frame. ``v_scale`` sets the speed scale used for degeneracy tolerances.
    """
    f_max = slider.limit_surface.max_force
    t_max = slider.limit_surface.max_torque
    mu = slider.contact_friction
    nx, ny = float(inward_normal[0]), float(inward_normal[1])
    ux, uy = float(pusher_velocity[0]), float(pusher_velocity[1])
    px = float(contact_point[0]) - slider.com_offset[0]
    py = float(contact_point[1]) - slider.com_offset[1]

    un = nx * ux + ny * uy
    if un <= 0.0:  # withdrawing or grazing: the slider is left behind
        return ContactSolution(ContactMode.SEPARATE, (0.0, 0.0), (0.0, 0.0, 0.0))

    f2 = f_max * f_max
    t2 = t_max * t_max
    zx, zy = -py, px  # lever direction: (z-hat cross p)

    # Sticking ansatz: the linear map from a force ray to the contact-point
    # velocity is A = I/f2 + outer(z, z)/t2; invert it against the pusher
    # velocity.
    axx = 1.0 / f2 + zx * zx / t2
    axy = zx * zy / t2
    ayy = 1.0 / f2 + zy * zy / t2
    det = axx * ayy - axy * axy
    if abs(det) < 1e-30:
        # measure-zero singular geometry: nudge the lever arm and retry once
        px += 1e-12
        py += 1e-12
        zx, zy = -py, px
        axx = 1.0 / f2 + zx * zx / t2
        axy = zx * zy / t2
        ayy = 1.0 / f2 + zy * zy / t2
        det = axx * ayy - axy * axy
    gx = (ayy * ux - axy * uy) / det
    gy = (-axy * ux + axx * uy) / det

    gn = gx * nx + gy * ny
    gmag = math.hypot(gx, gy)
    cone_cos = 1.0 / math.sqrt(1.0 + mu * mu)
    if gn >= gmag * cone_cos - 1e-12 * gmag:
        # inside (or exactly on) the friction cone: sticking solution
        tau = px * gy - py * gx
        scale = _surface_scale(gx, gy, tau, f_max, t_max)
        twist = (gx / f2, gy / f2, tau / t2)  # contact velocity equals the pusher's
        return ContactSolution(ContactMode.STICK, (gx * scale, gy * scale), twist)

    # Slipping: force pinned to a cone edge; match the normal contact speed
    # and require the tangential slip to agree with the friction side.
    tx, ty = -ny, nx
    g_side = 1.0 if (gx * tx + gy * ty) >= 0.0 else -1.0
    for sigma in (g_side, -g_side):
        ex = (nx + sigma * mu * tx) * cone_cos
        ey = (ny + sigma * mu * ty) * cone_cos
        tau_e = px * ey - py * ex
        dvx, dvy, dom = ex / f2, ey / f2, tau_e / t2
        vcx = dvx + dom * zx
        vcy = dvy + dom * zy
        denom = nx * vcx + ny * vcy
        if denom <= 0.0:
            continue
        k = un / denom
        slip = tx * (ux - k * vcx) + ty * (uy - k * vcy)
        if sigma * slip >= -1e-9 * v_scale:
            scale = _surface_scale(ex, ey, tau_e, f_max, t_max)
            mode = ContactMode.SLIP_POSITIVE if sigma > 0.0 else ContactMode.SLIP_NEGATIVE
            return ContactSolution(mode, (ex * scale, ey * scale), (k * dvx, k * dvy, k * dom))

    # no consistent edge (degenerate data); report as separation with a flag
    return ContactSolution(ContactMode.SEPARATE, (0.0, 0.0), (0.0, 0.0, 0.0), degenerate=True)


def brute_force_cone_scan(slider, contact_point: Sequence[float],
                          inward_normal: Sequence[float], pusher_velocity: Sequence[float],
                          samples: int = 100_001):
    """Reference solver by exhaustive force-direction sampling.

    Sweeps force directions across the friction cone (edges included), maps
    each through the limit-surface flow rule to a contact-point velocity, and
    returns the direction whose contact velocity best aligns with the pusher
    velocity:

    Returns (force_direction (2,), min_misalignment_rad, edge_index) where
    edge_index is -1 for an interior optimum, else 0/1 for the two cone edges.
    """
    f_max = slider.limit_surface.max_force
    t_max = slider.limit_surface.max_torque
    mu = slider.contact_friction
    nx, ny = float(inward_normal[0]), float(inward_normal[1])
    ux, uy = float(pusher_velocity[0]), float(pusher_velocity[1])
    px = float(contact_point[0]) - slider.com_offset[0]
    py = float(contact_point[1]) - slider.com_offset[1]

    half = math.atan(mu)
    base = math.atan2(ny, nx)
    ang = np.linspace(base - half, base + half, samples)
    fx = np.cos(ang)
    fy = np.sin(ang)
    tau = px * fy - py * fx
    f2 = f_max * f_max
    t2 = t_max * t_max
    vx = fx / f2 + (tau / t2) * (-py)
    vy = fy / f2 + (tau / t2) * (px)
    norm = np.hypot(vx, vy)
    umag = math.hypot(ux, uy)
    cosang = (vx * ux + vy * uy) / np.where(norm > 0.0, norm * umag, np.inf)
    mis = np.arccos(np.clip(cosang, -1.0, 1.0))
    i = int(np.argmin(mis))
    edge = -1
    if i == 0:
        edge = 0
    elif i == samples - 1:
        edge = 1
    return np.array([fx[i], fy[i]]), float(mis[i]), edge
