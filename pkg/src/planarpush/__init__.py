"""Quasistatic planar pushing: simulation, force-feedback control, and
robustness sweeps."""

from .config import GridConfig, HarnessConfig, PathConfig, SliderConfig, load_config
from .controller import (ControllerParams, ControllerState, admittance_offset,
                         avoid_obstacles_ee, combined_angle, control_tick,
                         filter_force, hardware_gains, open_loop_angle,
                         pushing_angle, simulation_gains)
from .engine import (GRAVITY, ContactParams, EngineDivergence, LimitSurface,
                     PushSimulation, SliderModel, WorldState, limit_surface_for,
                     step)
from .geometry import (Disk, Polygon, Pose2, box, closest_point_on_shape,
                       contact_offset_to_point, segment_shape_contacts,
                       wrap_angle)
from .ik import QPResult, RobotModel, contact_jacobian, solve_ik
from .oracle import ContactMode, ContactSolution, brute_force_cone_scan, solve_contact
from .paths import (Arc, FrenetProjection, Line, PathSpec, corner_path,
                    straight_path)
from .runner import (EngineAbort, Metrics, RunRecord, TraceRow, compute_metrics,
                     path_distances, run_scenario, run_sweep)
from .scenarios import (SLIDER_KINDS, Scenario, build_scenarios, initial_world,
                        make_path, make_slider, make_walls)

__version__ = "0.1.0"
