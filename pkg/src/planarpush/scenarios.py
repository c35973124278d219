"""Scenario construction: the robustness-sweep grid, slider models, desired
paths, corridor walls, and initial world placement."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional

from .config import HarnessConfig
from .engine import SliderModel, WorldState, limit_surface_for
from .geometry import Disk, Pose2, box, contact_offset_to_point, closest_point_on_shape
from .paths import PathSpec, corner_path, straight_path

SLIDER_KINDS = ("box", "cylinder")


@dataclass(frozen=True)
class Scenario:
    """One sweep cell: slider kind plus the initial-state/parameter grid
    values, the path, and the run duration."""

    slider_kind: str
    lateral_offset: float
    contact_offset: float
    orientation: float
    contact_friction: float
    pressure_variant: str
    path_name: str = "straight"
    walls_enabled: bool = False
    duration: float = 300.0
    seed: int = 0
    index: int = 0

    def label(self) -> str:
        return (
            f"{self.slider_kind}-{self.path_name}"
            f"{'-walls' if self.walls_enabled else ''}-{self.index:03d}"
        )


def build_scenarios(config: HarnessConfig, slider_kinds=SLIDER_KINDS,
                    path_name: str = "straight", walls_enabled: bool = False,
                    duration: Optional[float] = None) -> list[Scenario]:
    """Full Cartesian product of the grids, in deterministic lexicographic
    order (slider kind, lateral offset, contact offset, orientation, contact
    friction, pressure variant)."""
    g = config.grids
    duration = config.duration if duration is None else duration
    out = []
    for kind in slider_kinds:
        if kind not in SLIDER_KINDS:
            raise ValueError(f"unknown slider kind {kind!r}")
        for i, (dc, a0, phi, mu, variant) in enumerate(
            product(g.lateral_offsets, g.contact_offsets, g.orientations,
                    g.contact_frictions, g.pressure_variants)
        ):
            out.append(
                Scenario(
                    slider_kind=kind,
                    lateral_offset=dc,
                    contact_offset=a0,
                    orientation=phi,
                    contact_friction=mu,
                    pressure_variant=variant,
                    path_name=path_name,
                    walls_enabled=walls_enabled,
                    duration=duration,
                    index=i,
                )
            )
    return out


def make_shape(kind: str, config: HarnessConfig):
    if kind == "box":
        return box(config.sliders.box_side)
    if kind == "cylinder":
        return Disk(config.sliders.cylinder_radius)
    raise ValueError(f"unknown slider kind {kind!r}")


def make_slider(kind: str, contact_friction: float, pressure_variant: str,
                config: HarnessConfig, com_offset=None) -> SliderModel:
    shape = make_shape(kind, config)
    sc = config.sliders
    return SliderModel(
        shape=shape,
        mass=sc.mass,
        com_offset=sc.com_offset if com_offset is None else tuple(com_offset),
        contact_friction=contact_friction,
        limit_surface=limit_surface_for(shape, sc.mass, sc.support_friction, pressure_variant),
    )


def make_path(name: str, config: HarnessConfig) -> PathSpec:
    p = config.paths
    if name == "straight":
        return straight_path(p.straight_length)
    if name == "corner":
        return corner_path(p.corner_lead_in, p.corner_radius, p.corner_exit)
    raise ValueError(f"unknown path {name!r}")


def make_walls(path_name: str, config: HarnessConfig) -> tuple:
    """Corridor walls for the corner path: one wall running parallel to the
    lead-in on the outside of the turn, one blocking the far side."""
    if path_name != "corner":
        return ()
    p = config.paths
    far_x = p.corner_lead_in + p.corner_radius + p.wall_offset
    top_y = p.corner_radius + p.corner_exit
    return (
        ((-p.wall_back, -p.wall_offset), (far_x, -p.wall_offset)),
        ((far_x, -p.wall_offset), (far_x, top_y)),
    )


def initial_world(scenario: Scenario, config: HarnessConfig,
                  slider: Optional[SliderModel] = None,
                  path: Optional[PathSpec] = None) -> WorldState:
    """Place the slider and pusher for a scenario.

    The slider's contact reference point sits at the configured lateral
    offset from the path start, the body is rotated by the scenario
    orientation about that point, and the pusher sphere is lined up with the
    contact-offset point just off the surface (so the approach phase closes a
    small gap before first touch).
    """
    if slider is None:
        slider = make_slider(scenario.slider_kind, scenario.contact_friction,
                             scenario.pressure_variant, config)
    if path is None:
        path = make_path(scenario.path_name, config)
    start = path.point_at(0.0)
    heading = path.tangent_angle_at(0.0)
    nx, ny = -math.sin(heading), math.cos(heading)
    ref_world = (start[0] + scenario.lateral_offset * nx,
                 start[1] + scenario.lateral_offset * ny)
    theta = heading + scenario.orientation
    ref_body, _ = contact_offset_to_point(slider.shape, 0.0)
    c, s = math.cos(theta), math.sin(theta)
    pose = Pose2(
        ref_world[0] - (c * ref_body[0] - s * ref_body[1]),
        ref_world[1] - (s * ref_body[0] + c * ref_body[1]),
        theta,
    )
    cp_body, n_body = contact_offset_to_point(slider.shape, scenario.contact_offset)
    cp_world = pose.transform(cp_body)
    n_world = pose.rotate(n_body)
    standoff = config.engine.pusher_radius + config.initial_gap
    pusher = (cp_world[0] + standoff * n_world[0], cp_world[1] + standoff * n_world[1])

    walls = make_walls(scenario.path_name, config) if scenario.walls_enabled else ()
    _, _, sd = closest_point_on_shape(slider.shape, pose, pusher)
    if sd < config.engine.pusher_radius:
        raise ValueError("initial pusher placement intersects the slider")
    for wall in walls:
        from .geometry import segment_shape_contacts

        if segment_shape_contacts(slider.shape, pose, wall):
            raise ValueError("initial slider placement intersects a wall")
    return WorldState(slider_pose=pose, pusher_position=pusher, walls=walls)
