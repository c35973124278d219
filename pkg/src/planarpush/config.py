"""Harness configuration: engine constants, controller gains, scenario grids,
and path geometry, with optional overrides from a TOML file."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .controller import ControllerParams
from .engine import ContactParams
from .ik import RobotModel


@dataclass(frozen=True)
class GridConfig:
    """Scenario grids for the robustness sweep."""

    lateral_offsets: tuple = (-0.4, 0.0, 0.4)
    contact_offsets: tuple = (-0.4, 0.0, 0.4)
    orientations: tuple = (-math.pi / 8.0, 0.0, math.pi / 8.0)
    contact_frictions: tuple = (0.0, 0.5, 1.0)
    pressure_variants: tuple = ("centered", "uniform", "perimeter")


@dataclass(frozen=True)
class PathConfig:
    straight_length: float = 6.0
    corner_lead_in: float = 3.0
    corner_radius: float = 2.0
    corner_exit: float = 3.0
    wall_offset: float = 1.5       # lateral distance from the path to the corridor walls
    wall_back: float = 2.0         # how far the first wall extends behind the path start


@dataclass(frozen=True)
class SliderConfig:
    box_side: float = 1.0
    cylinder_radius: float = 0.5
    mass: float = 1.0
    support_friction: float = 0.25
    com_offset: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class HarnessConfig:
    gains: ControllerParams = field(default_factory=ControllerParams)
    engine: ContactParams = field(default_factory=ContactParams)
    robot: RobotModel = field(default_factory=RobotModel)
    grids: GridConfig = field(default_factory=GridConfig)
    paths: PathConfig = field(default_factory=PathConfig)
    sliders: SliderConfig = field(default_factory=SliderConfig)
    duration: float = 300.0
    sim_dt: float = 1e-3
    control_dt: float = 1e-2
    initial_gap: float = 0.01
    dipole_lookahead: float = 1.0
    open_loop_timeout: float = 10.0
    ramp_time: float = 1.0

    @property
    def substeps(self) -> int:
        n = round(self.control_dt / self.sim_dt)
        if abs(n * self.sim_dt - self.control_dt) > 1e-12:
            raise ValueError("control_dt must be an integer multiple of sim_dt")
        return int(n)


_SECTION_TYPES = {
    "gains": ControllerParams,
    "engine": ContactParams,
    "robot": RobotModel,
    "grids": GridConfig,
    "paths": PathConfig,
    "sliders": SliderConfig,
}


def load_config(path: Optional[str | Path] = None) -> HarnessConfig:
    """Build the harness configuration, merging a TOML file over defaults.

    Sections mirror the config dataclasses (``[gains]``, ``[engine]``,
    ``[robot]``, ``[grids]``, ``[paths]``, ``[sliders]``); top-level keys set
    run options like ``duration``.
    """
    cfg = HarnessConfig()
    if path is None:
        return cfg
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    top = {}
    for key, value in data.items():
        if key in _SECTION_TYPES:
            if not isinstance(value, dict):
                raise ValueError(f"config section [{key}] must be a table")
            base = getattr(cfg, key)
            for k, v in value.items():
                if not hasattr(base, k):
                    raise ValueError(f"unknown key {k!r} in config section [{key}]")
            fixed = {k: tuple(v) if isinstance(v, list) else v for k, v in value.items()}
            top[key] = replace(base, **fixed)
        else:
            if key not in HarnessConfig.__dataclass_fields__:
                raise ValueError(f"unknown config key {key!r}")
            top[key] = value
    return replace(cfg, **top)
