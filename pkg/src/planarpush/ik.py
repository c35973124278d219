"""Velocity-level inverse kinematics for an omnidirectional base.

Maps a commanded end-effector velocity to base joint velocities (x, y, yaw)
through a small quadratic program: achieve the EE velocity exactly, stay
within joint velocity limits and wall constraints, and among the remaining
freedom prefer small linear velocity while turning toward the path heading.

The QP has 3 variables and at most 8 inequality rows, so it is solved
exactly by active-set enumeration (one KKT solve per candidate set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .geometry import Pose2, Vec2, wrap_angle

_FEAS_TOL = 1e-10
_DUAL_TOL = 1e-10


@dataclass(frozen=True)
class RobotModel:
    """Omnidirectional base: a disk of ``base_radius`` whose EE contact point
    sits at ``contact_offset_body`` in the base frame."""

    base_radius: float = 0.55
    contact_offset_body: Vec2 = (0.7, 0.0)
    joint_velocity_limit: tuple[float, float, float] = (0.5, 0.5, 0.25)
    heading_gain: float = 1.0

    def __post_init__(self):
        if not self.base_radius > 0.0:
            raise ValueError("base radius must be positive")
        if not all(v > 0.0 for v in self.joint_velocity_limit):
            raise ValueError("joint velocity limits must be positive")


@dataclass(frozen=True)
class QPResult:
    joint_velocity: tuple[float, float, float]
    active_constraints: frozenset
    objective_value: float
    feasible: bool


def contact_jacobian(q: Pose2, contact_offset_body: Sequence[float]) -> np.ndarray:
    """2x3 Jacobian of the contact point: v_contact = J @ [vx, vy, omega]."""
    rx, ry = q.rotate(contact_offset_body)
    return np.array([[1.0, 0.0, -ry], [0.0, 1.0, rx]])


def _kkt_solve(Q, c, A_eq, b_eq):
    """Equality-constrained QP 0.5 x'Qx - c'x s.t. A_eq x = b_eq; returns
    (x, multipliers) or None on a singular system."""
    n = Q.shape[0]
    m = A_eq.shape[0]
    K = np.zeros((n + m, n + m))
    K[:n, :n] = Q
    K[:n, n:] = A_eq.T
    K[n:, :n] = A_eq
    rhs = np.concatenate([c, b_eq])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    return sol[:n], sol[n:]


def _enumerate_active_sets(Q, c, A_eq, b_eq, G, h):
    """Exact convex QP by enumerating active inequality subsets, smallest
    first; the first KKT point that is primal and dual feasible is optimal."""
    m = G.shape[0]
    n = Q.shape[0]
    for size in range(0, min(m, n - A_eq.shape[0]) + 1 if A_eq.size else min(m, n) + 1):
        for subset in combinations(range(m), size):
            rows = np.vstack([A_eq] + [G[list(subset)]]) if subset else A_eq
            vals = np.concatenate([b_eq, h[list(subset)]]) if subset else b_eq
            if rows.shape[0] > n:
                continue
            out = _kkt_solve(Q, c, rows, vals)
            if out is None:
                continue
            x, lam = out
            ineq_multipliers = lam[A_eq.shape[0]:]
            if np.any(ineq_multipliers < -_DUAL_TOL):
                continue
            if np.any(G @ x - h > _FEAS_TOL):
                continue
            return x, frozenset(subset)
    return None


def solve_ik(q: Pose2, v_cmd: Sequence[float], path_heading: float, model: RobotModel,
             obstacle_normals: Sequence[Sequence[float]] = ()) -> QPResult:
    """Solve the base IK QP.

    The secondary objective turns the base toward ``path_heading`` at the
    heading gain while keeping linear velocity small. Each obstacle normal
    (unit vector from the base center toward a nearby obstacle) contributes a
    row forbidding base translation toward it. If the EE velocity cannot be
    met under the constraints, the closest achievable velocity is returned
    with ``feasible=False``.
    """
    J = contact_jacobian(q, model.contact_offset_body)
    v = np.asarray(v_cmd, dtype=float)
    xi_d = np.array([0.0, 0.0, model.heading_gain * wrap_angle(path_heading - q.theta)])
    lim = np.asarray(model.joint_velocity_limit, dtype=float)

    G_rows = [np.eye(3), -np.eye(3)]
    h_parts = [lim, lim]
    for nrm in obstacle_normals:
        G_rows.append(np.array([[nrm[0], nrm[1], 0.0]]))
        h_parts.append(np.zeros(1))
    G = np.vstack(G_rows)
    h = np.concatenate(h_parts)

    Q = np.eye(3)
    out = _enumerate_active_sets(Q, xi_d, J, v, G, h)
    if out is not None:
        x, active = out
        obj = 0.5 * float(np.sum((xi_d - x) ** 2))
        return QPResult(tuple(x), active, obj, True)

    # EE velocity unreachable: fall back to the least-squares velocity error,
    # with a small pull toward xi_d to break ties
    eps = 1e-8
    Q2 = J.T @ J + eps * np.eye(3)
    c2 = J.T @ v + eps * xi_d
    out = _enumerate_active_sets(Q2, c2, np.zeros((0, 3)), np.zeros(0), G, h)
    if out is None:  # all joints pinned; return the zero motion
        x, active = np.zeros(3), frozenset()
    else:
        x, active = out
    obj = 0.5 * float(np.sum((J @ x - v) ** 2))
    return QPResult(tuple(x), active, obj, False)
