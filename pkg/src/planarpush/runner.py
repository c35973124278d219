"""Closed-loop simulation drivers, baseline controllers, and run metrics."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import HarnessConfig
from .controller import ControllerParams, ControllerState, control_tick, open_loop_angle
from .engine import EngineDivergence, PushSimulation, SliderModel
from .geometry import Pose2
from .ik import RobotModel, solve_ik
from .paths import PathSpec
from .scenarios import Scenario, initial_world, make_path, make_slider

CONTROLLERS = ("closed_loop", "open_loop", "dipole")
MODES = ("kinematic_pusher", "mobile_base")


@dataclass(frozen=True)
class TraceRow:
    time: float
    slider: tuple[float, float, float]
    pusher: tuple[float, float]
    force: tuple[float, float]
    heading: float
    mode: str
    contact_point: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class Metrics:
    normalized_distance: float
    max_deviation: float
    final_lateral_offset: float
    contact_loss_count: int
    completed: bool
    first_contact_time: Optional[float] = None
    path_progress: float = 0.0          # final slider station minus the first-contact station
    final_station: float = 0.0
    peak_force: float = 0.0
    mean_abs_offset_last_minute: float = 0.0
    max_contact_deviation: float = 0.0


@dataclass
class RunRecord:
    scenario: Scenario
    controller: str
    mode: str
    trace: list[TraceRow]
    metrics: Optional[Metrics] = None
    monitors: dict = field(default_factory=dict)
    aborted: bool = False
    abort_reason: str = ""


class EngineAbort(RuntimeError):
    """Engine divergence during a run; carries the partial record."""

    def __init__(self, message: str, record: RunRecord):
        super().__init__(message)
        self.record = record


def path_distances(path: PathSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Unsigned distance from each point to the path (with the final-tangent
    extension), vectorized; agrees with ``abs(project(p).lateral_offset)``."""
    from .paths import Arc, Line, _segment_end

    best = np.full(xs.shape, np.inf)
    for seg in path.segments:
        if isinstance(seg, Line):
            sx, sy = seg.start
            tx, ty = seg.tangent
            t = np.clip((xs - sx) * tx + (ys - sy) * ty, 0.0, seg.length)
            d = np.hypot(xs - (sx + t * tx), ys - (sy + t * ty))
        else:
            cx, cy = seg.center
            dx, dy = xs - cx, ys - cy
            psi = np.arctan2(dy, dx)
            rel = np.mod(psi - seg.start_angle, 2.0 * math.pi)
            if seg.sweep >= 0.0:
                u = rel / seg.sweep
            else:
                u = (rel - 2.0 * math.pi) / seg.sweep
            r = np.hypot(dx, dy)
            d_arc = np.abs(r - seg.radius)
            e0x, e0y = seg.point_at(0.0)
            e1x, e1y = seg.point_at(seg.length)
            d_ends = np.minimum(np.hypot(xs - e0x, ys - e0y), np.hypot(xs - e1x, ys - e1y))
            d = np.where((u >= 0.0) & (u <= 1.0), d_arc, d_ends)
        best = np.minimum(best, d)
    last = path.segments[-1]
    ex, ey = _segment_end(last)
    ta = last.tangent_angle_at(last.length)
    tx, ty = math.cos(ta), math.sin(ta)
    proj = (xs - ex) * tx + (ys - ey) * ty
    d_ext = np.hypot(xs - (ex + proj * tx), ys - (ey + proj * ty))
    best = np.where(proj > 0.0, np.minimum(best, d_ext), best)
    return best


def compute_metrics(trace_times: Sequence[float], slider_xy: np.ndarray,
                    force_norms: Sequence[float], path: PathSpec,
                    params: ControllerParams, duration_reached: bool,
                    contact_xy: Optional[np.ndarray] = None) -> Metrics:
    """Metrics from full-rate tick series.

    Progress is measured between the path stations of the slider position at
    first contact (force crossing the contact threshold) and at the final
    tick, normalized by the pushing speed times the elapsed time.
    """
    times = np.asarray(trace_times, dtype=float)
    forces = np.asarray(force_norms, dtype=float)
    xs = np.ascontiguousarray(slider_xy[:, 0])
    ys = np.ascontiguousarray(slider_xy[:, 1])
    if times.size < 2:
        raise ValueError("metrics need at least two samples")
    dists = path_distances(path, xs, ys)
    max_dev = float(np.max(dists))
    final_offset = float(dists[-1])
    contact = forces >= params.contact_force_min
    peak = float(np.max(forces)) if forces.size else 0.0
    last_minute = times >= times[-1] - 60.0
    mean_last = float(np.mean(dists[last_minute]))
    max_cdev = 0.0
    if contact_xy is not None and len(contact_xy):
        cxy = np.asarray(contact_xy, dtype=float)
        max_cdev = float(np.max(path_distances(path, cxy[:, 0], cxy[:, 1])))
    idx = np.flatnonzero(contact)
    if idx.size == 0:
        return Metrics(0.0, max_dev, final_offset, 0, False, None, 0.0,
                       float(path.project((xs[-1], ys[-1])).s), peak, mean_last, max_cdev)
    i0 = int(idx[0])
    t0 = float(times[i0])
    tf = float(times[-1])
    losses = int(np.sum(contact[i0:-1] & ~contact[i0 + 1:]))
    s0 = path.project((float(xs[i0]), float(ys[i0]))).s
    sf = path.project((float(xs[-1]), float(ys[-1]))).s
    d = sf - s0
    ideal = params.speed * (tf - t0)
    ratio = d / ideal if ideal > 0.0 else 0.0
    return Metrics(
        normalized_distance=ratio,
        max_deviation=max_dev,
        final_lateral_offset=final_offset,
        contact_loss_count=losses,
        completed=duration_reached,
        first_contact_time=t0,
        path_progress=d,
        final_station=sf,
        peak_force=peak,
        mean_abs_offset_last_minute=mean_last,
        max_contact_deviation=max_cdev,
    )


def _dipole_velocity(slider_meas, goal, ee, speed):
    """Dipole-field pushing direction from measured slider position: the field
    of a moment pointing at the goal, evaluated at the EE."""
    mx, my = goal[0] - slider_meas[0], goal[1] - slider_meas[1]
    mn = math.hypot(mx, my)
    rx, ry = ee[0] - slider_meas[0], ee[1] - slider_meas[1]
    rn = math.hypot(rx, ry)
    if mn == 0.0:
        return (0.0, 0.0)
    mx, my = mx / mn, my / mn
    if rn == 0.0:
        return (speed * mx, speed * my)
    rx, ry = rx / rn, ry / rn
    dot = mx * rx + my * ry
    dx = 2.0 * dot * rx - mx
    dy = 2.0 * dot * ry - my
    dn = math.hypot(dx, dy)
    if dn == 0.0:
        return (speed * mx, speed * my)
    return (speed * dx / dn, speed * dy / dn)


def run_scenario(scenario: Scenario, config: HarnessConfig,
                 controller: str = "closed_loop", mode: str = "kinematic_pusher",
                 params: Optional[ControllerParams] = None,
                 robot: Optional[RobotModel] = None,
                 admittance: bool = True, trace_every: int = 1,
                 com_offset=None) -> RunRecord:
    """Run one scenario to completion and return its record.

    ``controller`` selects the force-feedback law, the force-blind baseline
    (which stops once contact has been lost for the configured timeout), or
    the position-feedback dipole baseline. ``mode`` either drives the pusher
    sphere directly or routes the command through the mobile-base IK.
    """
    if controller not in CONTROLLERS:
        raise ValueError(f"unknown controller {controller!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    params = config.gains if params is None else params
    robot = config.robot if robot is None else robot
    slider = make_slider(scenario.slider_kind, scenario.contact_friction,
                         scenario.pressure_variant, config, com_offset=com_offset)
    path = make_path(scenario.path_name, config)
    world = initial_world(scenario, config, slider=slider, path=path)
    sim = PushSimulation(world, slider, config.engine)
    walls = sim.walls

    dt = config.control_dt
    substeps = config.substeps
    sub_dt = config.sim_dt
    n_ticks = int(round(scenario.duration / dt))
    state = ControllerState(heading_prev=path.project(world.pusher_position).tangent_angle)

    base_pose = None
    if mode == "mobile_base":
        ee0 = world.pusher_position
        th0 = path.tangent_angle_at(0.0)
        off = robot.contact_offset_body
        c0, s0 = math.cos(th0), math.sin(th0)
        base_pose = [ee0[0] - (c0 * off[0] - s0 * off[1]),
                     ee0[1] - (s0 * off[0] + c0 * off[1]), th0]

    times: list[float] = []
    sl_xy: list[tuple[float, float]] = []
    f_norms: list[float] = []
    contact_pts: list[tuple[float, float]] = []
    trace: list[TraceRow] = []
    record = RunRecord(scenario, controller, mode, trace)

    last_contact_t = 0.0
    duration_reached = False
    try:
        for tick in range(n_ticks):
            t = sim.time
            f_meas = sim.measured_force
            pusher = sim.pusher_position
            frenet = path.project(pusher)

            if controller == "closed_loop":
                v_cmd = control_tick(state, frenet, pusher, f_meas, dt, params,
                                     walls, admittance=admittance)
                heading = state.heading_prev
            elif controller == "open_loop":
                from .controller import avoid_obstacles_ee, filter_force

                filter_force(state, f_meas, dt, params.filter_time_constant)
                heading = open_loop_angle(frenet, params.offset_gain)
                state.heading_prev = heading
                v_cmd = (params.speed * math.cos(heading), params.speed * math.sin(heading))
                v_cmd = avoid_obstacles_ee(v_cmd, pusher, walls, params.obstacle_clearance)
            else:  # dipole
                from .controller import filter_force

                filter_force(state, f_meas, dt, params.filter_time_constant)
                pose = sim.slider_pose
                meas = (pose.x, pose.y)
                goal = path.point_ahead(path.project(meas).s, config.dipole_lookahead)
                v_cmd = _dipole_velocity(meas, goal, pusher, params.speed)
                heading = math.atan2(v_cmd[1], v_cmd[0]) if v_cmd != (0.0, 0.0) else state.heading_prev
                state.heading_prev = heading

            f_filt = state.force_filtered
            f_norm = math.hypot(f_filt[0], f_filt[1])
            in_contact = f_norm >= params.contact_force_min
            if in_contact:
                last_contact_t = t
            elif controller == "open_loop" and t - last_contact_t > config.open_loop_timeout:
                break

            if mode == "mobile_base":
                ramp = min(1.0, (t + dt) / config.ramp_time) if config.ramp_time > 0 else 1.0
                vmag = math.hypot(v_cmd[0], v_cmd[1])
                cap = ramp * params.speed
                if vmag > cap > 0.0:
                    v_cmd = (v_cmd[0] * cap / vmag, v_cmd[1] * cap / vmag)
                normals = []
                bx, by = base_pose[0], base_pose[1]
                for (ax, ay), (bx2, by2) in walls:
                    ex, ey = bx2 - ax, by2 - ay
                    tt = ((bx - ax) * ex + (by - ay) * ey) / (ex * ex + ey * ey)
                    tt = min(max(tt, 0.0), 1.0)
                    qx, qy = ax + tt * ex, ay + tt * ey
                    dx, dy = qx - bx, qy - by
                    dd = math.hypot(dx, dy)
                    if 0.0 < dd < params.obstacle_clearance + robot.base_radius:
                        normals.append((dx / dd, dy / dd))
                qp = solve_ik(Pose2(base_pose[0], base_pose[1], base_pose[2]),
                              v_cmd, frenet.tangent_angle, robot, normals)
                xi = qp.joint_velocity
                off = robot.contact_offset_body
                for _ in range(substeps):
                    cth = math.cos(base_pose[2])
                    sth = math.sin(base_pose[2])
                    ee_old = (base_pose[0] + cth * off[0] - sth * off[1],
                              base_pose[1] + sth * off[0] + cth * off[1])
                    base_pose[0] += xi[0] * sub_dt
                    base_pose[1] += xi[1] * sub_dt
                    base_pose[2] += xi[2] * sub_dt
                    cth = math.cos(base_pose[2])
                    sth = math.sin(base_pose[2])
                    ee_new = (base_pose[0] + cth * off[0] - sth * off[1],
                              base_pose[1] + sth * off[0] + cth * off[1])
                    sim.advance(((ee_new[0] - ee_old[0]) / sub_dt,
                                 (ee_new[1] - ee_old[1]) / sub_dt), sub_dt, 1)
            else:
                sim.advance(v_cmd, sub_dt, substeps)

            times.append(t)
            pose = sim.slider_pose
            sl_xy.append((pose.x, pose.y))
            f_norms.append(f_norm)
            cp = sim.contact_point
            if cp is not None:
                contact_pts.append(cp)
            if tick % trace_every == 0:
                trace.append(
                    TraceRow(
                        time=t,
                        slider=(pose.x, pose.y, pose.theta),
                        pusher=sim.pusher_position,
                        force=f_filt,
                        heading=heading,
                        mode="push" if in_contact else "seek",
                        contact_point=cp,
                    )
                )
        else:
            duration_reached = True
    except EngineDivergence as exc:
        record.aborted = True
        record.abort_reason = str(exc)
        record.monitors = sim.monitors
        if len(times) >= 2:
            record.metrics = compute_metrics(
                times, np.array(sl_xy), f_norms, path, params, False,
                np.array(contact_pts) if contact_pts else None)
        raise EngineAbort(str(exc), record) from exc

    record.monitors = sim.monitors
    record.metrics = compute_metrics(
        times, np.array(sl_xy), f_norms, path, params, duration_reached,
        np.array(contact_pts) if contact_pts else None)
    return record


def _sweep_worker(args):
    scenario, config, controller, mode, admittance, trace_every = args
    try:
        return run_scenario(scenario, config, controller=controller, mode=mode,
                            admittance=admittance, trace_every=trace_every)
    except EngineAbort as exc:
        return exc.record


def run_sweep(scenarios: Sequence[Scenario], config: HarnessConfig,
              controller: str = "closed_loop", mode: str = "kinematic_pusher",
              jobs: int = 1, admittance: bool = True,
              trace_every: int = 50) -> list[RunRecord]:
    """Run many scenarios, optionally across worker processes.

    Results are ordered by scenario position regardless of worker count, so
    sweep outputs are reproducible byte-for-byte.
    """
    args = [(sc, config, controller, mode, admittance, trace_every) for sc in scenarios]
    if jobs <= 1:
        return [_sweep_worker(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_worker, args, chunksize=4))
