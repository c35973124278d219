"""Randomized cross-checks between the penalty engine, the analytic contact
solver, and the exhaustive cone-sampling reference."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import HarnessConfig
from .engine import (ContactParams, LimitSurface, PushSimulation, SliderModel,
                     WorldState, limit_surface_for)
from .geometry import Disk, Pose2, box, closest_point_on_shape, contact_offset_to_point
from .oracle import ContactMode, ContactSolution, brute_force_cone_scan, solve_contact


@dataclass(frozen=True)
class OracleCase:
    attempted: bool
    in_contact: bool
    engine_mode: str = ""
    oracle_mode: str = ""
    force_angle_error: float = math.nan
    twist_angle_error: float = math.nan

    @property
    def modes_agree(self) -> bool:
        return self.engine_mode == self.oracle_mode


def _mode_label(mode: ContactMode) -> str:
    if mode is ContactMode.STICK:
        return "stick"
    if mode is ContactMode.SEPARATE:
        return "separate"
    return "slip+" if mode is ContactMode.SLIP_POSITIVE else "slip-"


def _angle_between(ax, ay, bx, by) -> float:
    na = math.hypot(ax, ay)
    nb = math.hypot(bx, by)
    if na == 0.0 or nb == 0.0:
        return math.nan
    c = (ax * bx + ay * by) / (na * nb)
    return math.acos(min(1.0, max(-1.0, c)))


def _angle_between3(a, b) -> float:
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0.0 or nb == 0.0:
        return math.nan
    c = sum(x * y for x, y in zip(a, b)) / (na * nb)
    return math.acos(min(1.0, max(-1.0, c)))


def engine_oracle_case(rng: np.random.Generator, config: HarnessConfig,
                       push_duration: float = 2.0) -> OracleCase:
    """One randomized free-space push: settle the engine for the given
    duration at constant velocity, then compare its final force/twist
    directions and contact mode against the analytic solution at the final
    configuration."""
    kind = rng.choice(("box", "cylinder"))
    variant = rng.choice(("centered", "uniform", "perimeter"))
    mu = float(rng.choice((0.0, 0.3, 0.5, 1.0)))
    alpha = float(rng.uniform(-0.3, 0.3))
    phi = float(rng.uniform(-math.pi, math.pi))
    angle_off = float(rng.uniform(-0.6, 0.6))
    speed = float(rng.uniform(0.05, 0.12))

    sc = config.sliders
    shape = box(sc.box_side) if kind == "box" else Disk(sc.cylinder_radius)
    slider = SliderModel(
        shape=shape, mass=sc.mass, com_offset=(0.0, 0.0), contact_friction=mu,
        limit_surface=limit_surface_for(shape, sc.mass, sc.support_friction, variant),
    )
    pose = Pose2(0.0, 0.0, phi)
    cp_b, n_b = contact_offset_to_point(shape, alpha)
    cp_w = pose.transform(cp_b)
    n_w = pose.rotate(n_b)
    standoff = config.engine.pusher_radius + 1e-4
    pusher = (cp_w[0] + standoff * n_w[0], cp_w[1] + standoff * n_w[1])
    push_dir = math.atan2(-n_w[1], -n_w[0]) + angle_off
    u = (speed * math.cos(push_dir), speed * math.sin(push_dir))

    world = WorldState(slider_pose=pose, pusher_position=pusher)
    sim = PushSimulation(world, slider, config.engine)
    n_steps = int(round(push_duration / config.sim_dt))
    sim.advance(u, config.sim_dt, n_steps)

    if not sim.in_contact or sim.contact_normal_force <= 0.0:
        return OracleCase(attempted=True, in_contact=False)

    pose_f = sim.slider_pose
    cp = sim.contact_point
    _, n_out_w, _ = closest_point_on_shape(shape, pose_f, sim.pusher_position)
    cp_body = pose_f.inverse_transform(cp)
    n_in_body = pose_f.inverse_rotate((-n_out_w[0], -n_out_w[1]))
    u_body = pose_f.inverse_rotate(u)
    sol = solve_contact(slider, cp_body, n_in_body, u_body, v_scale=speed)

    # engine mode from the tangential slip speed at the contact
    eps = config.engine.regularization_velocity
    slip = sim.contact_slip_velocity
    if abs(slip) > 3.0 * eps:
        engine_mode = "slip+" if slip > 0.0 else "slip-"
    else:
        engine_mode = "stick"

    f_eng = sim.measured_force
    f_orc = pose_f.rotate(sol.force)
    fa = _angle_between(f_eng[0], f_eng[1], f_orc[0], f_orc[1])

    tw_eng = sim.slider_twist
    v_orc = pose_f.rotate((sol.twist[0], sol.twist[1]))
    ls = slider.limit_surface
    char_len = ls.max_torque / ls.max_force
    ta = _angle_between3(
        (tw_eng[0], tw_eng[1], char_len * tw_eng[2]),
        (v_orc[0], v_orc[1], char_len * sol.twist[2]),
    )
    return OracleCase(
        attempted=True, in_contact=True,
        engine_mode=engine_mode, oracle_mode=_mode_label(sol.mode),
        force_angle_error=fa, twist_angle_error=ta,
    )


def run_engine_oracle_check(n_cases: int = 220, seed: int = 7,
                            config: Optional[HarnessConfig] = None,
                            push_duration: float = 2.0) -> list[OracleCase]:
    config = config if config is not None else HarnessConfig()
    rng = np.random.default_rng(seed)
    return [engine_oracle_case(rng, config, push_duration) for _ in range(n_cases)]


@dataclass(frozen=True)
class BruteCase:
    oracle_mode: str
    brute_edge: int                 # -1 interior, 0/1 cone edges
    force_angle_error: float
    mode_consistent: bool


def brute_force_case(rng: np.random.Generator, samples: int = 100_001) -> BruteCase:
    """Compare the analytic solver against the cone-sampling reference on a
    random synthetic contact."""
    f_max = float(rng.uniform(1.0, 5.0))
    t_max = f_max * float(rng.uniform(0.2, 0.8))
    mu = float(rng.uniform(0.05, 1.5))
    shape = Disk(1.0)  # geometry is irrelevant to the solver; only the limit surface matters
    slider = SliderModel(shape=shape, mass=1.0, com_offset=(0.0, 0.0),
                         contact_friction=mu,
                         limit_surface=LimitSurface(max_force=f_max, max_torque=t_max))
    r = float(rng.uniform(0.2, 0.9))
    ang = float(rng.uniform(-math.pi, math.pi))
    p = (r * math.cos(ang), r * math.sin(ang))
    n_ang = ang + math.pi + float(rng.uniform(-0.5, 0.5))  # roughly opposing the lever arm
    n = (math.cos(n_ang), math.sin(n_ang))
    u_ang = n_ang + float(rng.uniform(-1.2, 1.2))
    speed = float(rng.uniform(0.02, 0.2))
    u = (speed * math.cos(u_ang), speed * math.sin(u_ang))
    if n[0] * u[0] + n[1] * u[1] <= 1e-6:
        u = (speed * n[0], speed * n[1])

    sol = solve_contact(slider, p, n, u, v_scale=speed)
    fdir, mis, edge = brute_force_cone_scan(slider, p, n, u, samples=samples)
    fa = _angle_between(sol.force[0], sol.force[1], fdir[0], fdir[1])

    half = math.atan(mu)
    grid = 2.0 * half / (samples - 1)
    if sol.mode is ContactMode.STICK:
        consistent = (edge == -1 and mis < 1e-3) or mis < 2.0 * grid
    elif sol.mode is ContactMode.SLIP_NEGATIVE:
        consistent = edge == 0 or fa < 2.0 * grid
    elif sol.mode is ContactMode.SLIP_POSITIVE:
        consistent = edge == 1 or fa < 2.0 * grid
    else:
        consistent = False
    return BruteCase(_mode_label(sol.mode), edge, fa, consistent)


def run_brute_force_check(n_instances: int = 500, seed: int = 11,
                          samples: int = 100_001) -> list[BruteCase]:
    rng = np.random.default_rng(seed)
    return [brute_force_case(rng, samples=samples) for _ in range(n_instances)]
