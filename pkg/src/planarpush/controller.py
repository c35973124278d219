"""Force-feedback pushing controller.

Produces a commanded end-effector velocity each control tick from the
filtered contact force and the Frenet projection of the contact point onto
the desired path. Operates purely on measured force: no slider model, pose,
or friction knowledge is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import Vec2, wrap_angle
from .paths import FrenetProjection


@dataclass
class ControllerParams:
    """Gains and thresholds of the pushing controller.

    Defaults are the simulation tuning; :func:`hardware_gains` returns the
    variant used on the real robot (stiffer lateral gain, higher contact
    threshold).
    """

    speed: float = 0.1                    # commanded pushing speed, m/s
    force_angle_gain: float = 0.3         # gain on the force/path angle error
    offset_gain: float = 0.1              # gain on lateral path offset, rad/m
    admittance_gain: float = 0.003        # velocity offset per newton above the force limit
    heading_gain: float = 1.0             # base heading correction gain, 1/s
    contact_force_min: float = 1.0        # force below which contact counts as lost, N
    force_limit: float = 50.0             # admittance activation threshold, N
    recovery_rate_max: float = 0.1        # per-tick heading change limit during recovery, rad
    obstacle_clearance: float = 0.1       # EE obstacle standoff, m
    filter_time_constant: float = 0.05    # force filter time constant, s
    joint_velocity_limit: tuple[float, float, float] = (0.5, 0.5, 0.25)

    def __post_init__(self):
        for name in (
            "speed",
            "force_angle_gain",
            "offset_gain",
            "admittance_gain",
            "heading_gain",
            "contact_force_min",
            "force_limit",
            "recovery_rate_max",
            "obstacle_clearance",
            "filter_time_constant",
        ):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.contact_force_min < self.force_limit:
            raise ValueError("contact_force_min must be below force_limit")
        if not all(v > 0.0 for v in self.joint_velocity_limit):
            raise ValueError("joint velocity limits must be strictly positive")


def simulation_gains() -> ControllerParams:
    return ControllerParams()


def hardware_gains() -> ControllerParams:
    return ControllerParams(offset_gain=0.5, contact_force_min=5.0)


@dataclass
class ControllerState:
    """Per-run controller memory: previous commanded heading and the filtered
    force. The heading starts at the initial path heading so the approach
    phase drives along the path."""

    heading_prev: float
    force_filtered: Vec2 = (0.0, 0.0)
    last_update_time: float = 0.0


def filter_force(state: ControllerState, f_meas: Sequence[float], dt: float,
                 time_constant: float) -> Vec2:
    """Exponential smoothing of the measured force; updates the state memory."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    beta = 1.0 - math.exp(-dt / time_constant)
    fx = beta * f_meas[0] + (1.0 - beta) * state.force_filtered[0]
    fy = beta * f_meas[1] + (1.0 - beta) * state.force_filtered[1]
    state.force_filtered = (fx, fy)
    return (fx, fy)


def pushing_angle(frenet: FrenetProjection, force: Sequence[float],
                  force_angle_gain: float, offset_gain: float) -> float:
    """Contact-feedback pushing direction.

    Steers beyond the measured force angle (gain + 1) so the slider rotates
    back toward the path heading, plus a term pushing away from the path in
    proportion to the lateral offset.
    """
    fx, fy = force[0], force[1]
    if fx == 0.0 and fy == 0.0:
        raise ValueError("pushing angle undefined for zero force")
    theta_f = math.atan2(fy, fx)
    df = wrap_angle(theta_f - frenet.tangent_angle)
    return wrap_angle(
        frenet.tangent_angle + (force_angle_gain + 1.0) * df + offset_gain * frenet.lateral_offset
    )


def open_loop_angle(frenet: FrenetProjection, offset_gain: float) -> float:
    """Force-blind steering angle; note the lateral term sign is opposite to
    the contact law because the EE itself steers back toward the path."""
    return wrap_angle(frenet.tangent_angle - offset_gain * frenet.lateral_offset)


def combined_angle(state: ControllerState, frenet: FrenetProjection,
                   force_filtered: Sequence[float], params: ControllerParams) -> float:
    """Commanded EE heading: contact law when force is present, otherwise a
    rate-limited turn from the previous heading toward the open-loop angle."""
    fx, fy = force_filtered[0], force_filtered[1]
    if math.hypot(fx, fy) < params.contact_force_min:
        target = open_loop_angle(frenet, params.offset_gain)
        gamma = wrap_angle(target - state.heading_prev)
        gamma = min(max(gamma, -params.recovery_rate_max), params.recovery_rate_max)
        heading = wrap_angle(state.heading_prev + gamma)
    else:
        heading = pushing_angle(frenet, force_filtered, params.force_angle_gain, params.offset_gain)
    state.heading_prev = heading
    return heading


def admittance_offset(force: Sequence[float], params: ControllerParams) -> Vec2:
    """Velocity offset opposing the measured force when it exceeds the limit;
    zero otherwise (continuous at the limit)."""
    fx, fy = force[0], force[1]
    mag = math.hypot(fx, fy)
    if mag <= params.force_limit:
        return (0.0, 0.0)
    k = params.admittance_gain * (params.force_limit - mag) / mag
    return (k * fx, k * fy)


def avoid_obstacles_ee(velocity: Sequence[float], position: Sequence[float],
                       walls: Sequence, clearance: float) -> Vec2:
    """Rotate the EE velocity so it stops closing on any wall within the
    clearance distance, preserving speed.

    The velocity turns by the smallest angle making the component toward the
    obstacle non-positive; an exactly head-on velocity breaks the tie
    counterclockwise. With several walls in range the most-violated one is
    handled first and the result re-checked; if two passes cannot resolve it
    the command is zeroed.
    """
    vx, vy = float(velocity[0]), float(velocity[1])
    px, py = float(position[0]), float(position[1])
    if (vx == 0.0 and vy == 0.0) or not walls:
        return (vx, vy)
    for _ in range(2):
        worst = None
        worst_closing = 0.0
        for (ax, ay), (bx, by) in walls:
            ex, ey = bx - ax, by - ay
            seg_len2 = ex * ex + ey * ey
            t = ((px - ax) * ex + (py - ay) * ey) / seg_len2
            t = min(max(t, 0.0), 1.0)
            cx, cy = ax + t * ex, ay + t * ey
            dx, dy = cx - px, cy - py
            d = math.hypot(dx, dy)
            if d >= clearance or d == 0.0:
                continue
            nx, ny = dx / d, dy / d  # unit vector from the EE toward the wall
            closing = nx * vx + ny * vy
            if closing > worst_closing:
                worst_closing = closing
                worst = (nx, ny)
        if worst is None:
            return (vx, vy)
        nx, ny = worst
        tx, ty = -ny, nx
        tangential = tx * vx + ty * vy
        sign = 1.0 if tangential >= 0.0 else -1.0
        speed = math.hypot(vx, vy)
        vx, vy = sign * speed * tx, sign * speed * ty
    # re-check after the second rotation; give up if still closing
    for (ax, ay), (bx, by) in walls:
        ex, ey = bx - ax, by - ay
        t = ((px - ax) * ex + (py - ay) * ey) / (ex * ex + ey * ey)
        t = min(max(t, 0.0), 1.0)
        cx, cy = ax + t * ex, ay + t * ey
        d = math.hypot(cx - px, cy - py)
        if 0.0 < d < clearance and ((cx - px) * vx + (cy - py) * vy) / d > 1e-12:
            return (0.0, 0.0)
    return (vx, vy)


def control_tick(state: ControllerState, frenet: FrenetProjection,
                 position: Sequence[float], f_meas: Sequence[float], dt: float,
                 params: ControllerParams, walls: Sequence = (),
                 admittance: bool = True) -> Vec2:
    """One controller update: filter the force, pick the heading, steer clear
    of walls, add the admittance offset, and clamp the speed.

    ``position`` is the EE contact reference the path projection was taken
    from. Returns the commanded EE velocity.
    """
    f_filt = filter_force(state, f_meas, dt, params.filter_time_constant)
    state.last_update_time += dt
    heading = combined_angle(state, frenet, f_filt, params)
    vx = params.speed * math.cos(heading)
    vy = params.speed * math.sin(heading)
    vx, vy = avoid_obstacles_ee((vx, vy), position, walls, params.obstacle_clearance)
    if admittance:
        ax, ay = admittance_offset(f_filt, params)
        vx, vy = vx + ax, vy + ay
    mag = math.hypot(vx, vy)
    if mag > params.speed:
        scale = params.speed / mag
        vx, vy = vx * scale, vy * scale
    return (vx, vy)
