"""Command-line harness: single runs, robustness sweeps, controller
comparisons, and engine/solver cross-checks."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .config import HarnessConfig, load_config
from .outputs import emit_outputs
from .runner import run_scenario, run_sweep
from .scenarios import SLIDER_KINDS, Scenario, build_scenarios
from .validation import run_brute_force_check, run_engine_oracle_check


def _add_config_arg(p):
    p.add_argument("--config", type=str, default=None, help="TOML config file")


def _scenario_from_args(args, config) -> Scenario:
    return Scenario(
        slider_kind=args.slider,
        lateral_offset=args.lateral_offset,
        contact_offset=args.contact_offset,
        orientation=args.orientation,
        contact_friction=args.friction,
        pressure_variant=args.pressure,
        path_name=args.path,
        walls_enabled=args.walls,
        duration=args.duration if args.duration is not None else config.duration,
    )


def _cmd_run(args) -> int:
    config = load_config(args.config)
    scenario = _scenario_from_args(args, config)
    com = tuple(float(v) for v in args.com_offset.split(",")) if args.com_offset else None
    record = run_scenario(
        scenario, config, controller=args.controller, mode=args.mode,
        admittance=not args.no_admittance, trace_every=args.trace_every,
        com_offset=com,
    )
    m = record.metrics
    print(f"scenario {scenario.label()} controller={args.controller} mode={args.mode}")
    print(f"  completed            : {m.completed}")
    print(f"  normalized distance  : {m.normalized_distance:.4f}")
    print(f"  max deviation        : {m.max_deviation:.4f} m")
    print(f"  final lateral offset : {m.final_lateral_offset:.4f} m")
    print(f"  peak force           : {m.peak_force:.2f} N")
    print(f"  contact losses       : {m.contact_loss_count}")
    if args.out:
        files = emit_outputs([record], args.out, config)
        print(f"  wrote {len(files)} files to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    kinds = SLIDER_KINDS if args.slider == "both" else (args.slider,)
    scenarios = build_scenarios(config, kinds, path_name=args.path,
                                walls_enabled=args.walls, duration=args.duration)
    if args.limit:
        scenarios = scenarios[: args.limit]
    print(f"running {len(scenarios)} scenarios on {args.jobs} worker(s)...")
    records = run_sweep(scenarios, config, controller=args.controller,
                        jobs=args.jobs, trace_every=args.trace_every,
                        admittance=not args.no_admittance)
    done = sum(1 for r in records if r.metrics is not None and r.metrics.completed)
    print(f"completed {done}/{len(records)} runs")
    if args.out:
        files = emit_outputs(records, args.out, config)
        print(f"wrote {len(files)} files to {args.out}")
    worst = max((r.metrics.max_deviation for r in records if r.metrics), default=float("nan"))
    print(f"worst max-deviation: {worst:.3f} m")
    return 0 if done == len(records) else 1


def _cmd_compare(args) -> int:
    config = load_config(args.config)
    kinds = SLIDER_KINDS if args.slider == "both" else (args.slider,)
    scenarios = build_scenarios(config, kinds, path_name=args.path,
                                walls_enabled=args.walls, duration=args.duration)
    if args.friction is not None:
        scenarios = [s for s in scenarios if s.contact_friction == args.friction]
    if args.limit:
        scenarios = scenarios[: args.limit]
    controllers = args.controllers.split(",")
    all_records = []
    for ctrl in controllers:
        print(f"running {len(scenarios)} scenarios with {ctrl}...")
        records = run_sweep(scenarios, config, controller=ctrl.strip(),
                            jobs=args.jobs, trace_every=args.trace_every)
        all_records += records
        ok = [r.metrics for r in records if r.metrics is not None]
        mean_nd = sum(m.normalized_distance for m in ok) / max(len(ok), 1)
        mean_dev = sum(m.max_deviation for m in ok) / max(len(ok), 1)
        n_done = sum(1 for m in ok if m.completed)
        print(f"  {ctrl}: completed {n_done}/{len(records)}, "
              f"mean normalized distance {mean_nd:.3f}, mean max deviation {mean_dev:.3f} m")
    if args.out:
        files = emit_outputs(all_records, args.out, config)
        print(f"wrote {len(files)} files to {args.out}")
    return 0


def _cmd_oracle_check(args) -> int:
    config = load_config(args.config)
    cases = run_engine_oracle_check(args.cases, seed=args.seed, config=config,
                                    push_duration=args.duration)
    valid = [c for c in cases if c.in_contact]
    agree = [c for c in valid if c.modes_agree]
    max_f = max((math.degrees(c.force_angle_error) for c in agree), default=float("nan"))
    max_t = max((math.degrees(c.twist_angle_error) for c in agree), default=float("nan"))
    print(f"engine vs analytic solver: {len(valid)}/{len(cases)} cases kept contact")
    print(f"  mode agreement      : {len(agree)}/{len(valid)} "
          f"({100.0 * len(agree) / max(len(valid), 1):.1f}%)")
    print(f"  worst force angle   : {max_f:.2f} deg")
    print(f"  worst twist angle   : {max_t:.2f} deg")

    brute = run_brute_force_check(args.brute_instances, seed=args.seed + 1)
    ok = sum(1 for b in brute if b.mode_consistent)
    worst = max(math.degrees(b.force_angle_error) for b in brute)
    print(f"analytic solver vs cone sampling: {ok}/{len(brute)} consistent, "
          f"worst force angle {worst:.4f} deg")
    passed = (
        len(valid) >= min(200, args.cases)
        and len(agree) >= 0.98 * len(valid)
        and max_f <= 5.0
        and max_t <= 5.0
        and ok == len(brute)
    )
    print("PASS" if passed else "FAIL")
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="planarpush",
        description="Quasistatic planar pushing: simulation, control, and robustness sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single scenario")
    _add_config_arg(p_run)
    p_run.add_argument("--slider", choices=SLIDER_KINDS, default="box")
    p_run.add_argument("--path", choices=("straight", "corner"), default="straight")
    p_run.add_argument("--walls", action="store_true")
    p_run.add_argument("--lateral-offset", type=float, default=0.0)
    p_run.add_argument("--contact-offset", type=float, default=0.0)
    p_run.add_argument("--orientation", type=float, default=0.0)
    p_run.add_argument("--friction", type=float, default=0.5)
    p_run.add_argument("--pressure", choices=("centered", "uniform", "perimeter"),
                       default="uniform")
    p_run.add_argument("--duration", type=float, default=None)
    p_run.add_argument("--controller", choices=("closed_loop", "open_loop", "dipole"),
                       default="closed_loop")
    p_run.add_argument("--mode", choices=("kinematic_pusher", "mobile_base"),
                       default="kinematic_pusher")
    p_run.add_argument("--no-admittance", action="store_true")
    p_run.add_argument("--com-offset", type=str, default=None,
                       help="body-frame CoM offset as 'x,y'")
    p_run.add_argument("--trace-every", type=int, default=1)
    p_run.add_argument("--out", type=str, default=None)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the full scenario grid")
    _add_config_arg(p_sweep)
    p_sweep.add_argument("--slider", choices=(*SLIDER_KINDS, "both"), default="both")
    p_sweep.add_argument("--path", choices=("straight", "corner"), default="straight")
    p_sweep.add_argument("--walls", action="store_true")
    p_sweep.add_argument("--controller", choices=("closed_loop", "open_loop", "dipole"),
                         default="closed_loop")
    p_sweep.add_argument("--duration", type=float, default=None)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--limit", type=int, default=None)
    p_sweep.add_argument("--no-admittance", action="store_true")
    p_sweep.add_argument("--trace-every", type=int, default=50)
    p_sweep.add_argument("--out", type=str, default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cmp = sub.add_parser("compare", help="compare controllers on a scenario set")
    _add_config_arg(p_cmp)
    p_cmp.add_argument("--slider", choices=(*SLIDER_KINDS, "both"), default="box")
    p_cmp.add_argument("--path", choices=("straight", "corner"), default="straight")
    p_cmp.add_argument("--walls", action="store_true")
    p_cmp.add_argument("--controllers", type=str, default="closed_loop,open_loop,dipole")
    p_cmp.add_argument("--friction", type=float, default=None,
                       help="keep only scenarios with this contact friction")
    p_cmp.add_argument("--duration", type=float, default=None)
    p_cmp.add_argument("--jobs", type=int, default=1)
    p_cmp.add_argument("--limit", type=int, default=None)
    p_cmp.add_argument("--trace-every", type=int, default=50)
    p_cmp.add_argument("--out", type=str, default=None)
    p_cmp.set_defaults(func=_cmd_compare)

    p_orc = sub.add_parser("oracle-check",
                           help="randomized engine vs analytic-solver equivalence check")
    _add_config_arg(p_orc)
    p_orc.add_argument("--cases", type=int, default=220)
    p_orc.add_argument("--seed", type=int, default=7)
    p_orc.add_argument("--duration", type=float, default=2.0)
    p_orc.add_argument("--brute-instances", type=int, default=500)
    p_orc.set_defaults(func=_cmd_oracle_check)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
