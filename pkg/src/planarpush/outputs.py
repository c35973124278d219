"""Machine-readable run outputs: JSONL traces, a sweep metrics CSV, and SVG
trajectory overlays. All floats serialize at full round-trip precision and
identical inputs produce identical bytes."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import HarnessConfig
from .paths import PathSpec
from .runner import RunRecord, path_distances
from .scenarios import make_path, make_walls
from .svgplot import SvgCanvas

_SCENARIO_FIELDS = (
    "slider_kind", "lateral_offset", "contact_offset", "orientation",
    "contact_friction", "pressure_variant", "path_name", "walls_enabled",
    "duration", "seed",
)
_METRIC_FIELDS = (
    "normalized_distance", "max_deviation", "final_lateral_offset",
    "contact_loss_count", "completed", "first_contact_time", "path_progress",
    "final_station", "peak_force", "mean_abs_offset_last_minute",
    "max_contact_deviation",
)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_trace_jsonl(record: RunRecord, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in record.trace:
            fh.write(json.dumps(
                {
                    "t": row.time,
                    "slider": list(row.slider),
                    "pusher": list(row.pusher),
                    "force": list(row.force),
                    "heading": row.heading,
                    "mode": row.mode,
                    "contact_point": list(row.contact_point) if row.contact_point else None,
                },
                sort_keys=True,
            ))
            fh.write("\n")


def write_metrics_csv(records: Sequence[RunRecord], path: Path) -> None:
    header = ["run", "controller", "mode", *_SCENARIO_FIELDS, *_METRIC_FIELDS, "aborted"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, rec in enumerate(records):
            row = [str(i), rec.controller, rec.mode]
            row += [_cell(getattr(rec.scenario, f)) for f in _SCENARIO_FIELDS]
            if rec.metrics is None:
                row += [""] * len(_METRIC_FIELDS)
            else:
                row += [_cell(getattr(rec.metrics, f)) for f in _METRIC_FIELDS]
            row.append(_cell(rec.aborted))
            writer.writerow(row)


def _sample_path_points(path: PathSpec, n: int = 400):
    total = path.length
    return [path.point_at(total * i / (n - 1)) for i in range(n)]


def write_overlay_svg(records: Sequence[RunRecord], path: PathSpec, walls,
                      out_file: Path, title: str = "") -> None:
    """Trajectory overlay: desired path dashed, walls red, each run's slider
    trajectory blue, and the overall farthest-from-path point starred."""
    xs: list[float] = []
    ys: list[float] = []
    path_pts = _sample_path_points(path)
    xs += [p[0] for p in path_pts]
    ys += [p[1] for p in path_pts]
    for rec in records:
        xs += [row.slider[0] for row in rec.trace]
        ys += [row.slider[1] for row in rec.trace]
    for (ax, ay), (bx, by) in walls:
        xs += [ax, bx]
        ys += [ay, by]
    if not xs:
        return
    pad = 0.5
    canvas = SvgCanvas(min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)
    canvas.polyline(path_pts, stroke="black", width=1.5, dashed=True)
    for (a, b) in walls:
        canvas.polyline([a, b], stroke="red", width=3.0)
    star_at: Optional[tuple[float, float]] = None
    star_dev = -1.0
    for rec in records:
        pts = [(row.slider[0], row.slider[1]) for row in rec.trace]
        canvas.polyline(pts, stroke="steelblue", width=1.0, opacity=0.45)
        if pts:
            axy = np.array(pts)
            d = path_distances(path, axy[:, 0], axy[:, 1])
            i = int(np.argmax(d))
            if d[i] > star_dev:
                star_dev = float(d[i])
                star_at = pts[i]
    if star_at is not None:
        canvas.star(star_at[0], star_at[1])
    if title:
        canvas.text(8.0, 18.0, title)
    out_file.write_text(canvas.render(), encoding="utf-8")


def emit_outputs(records: Sequence[RunRecord], out_dir: str | Path,
                 config: Optional[HarnessConfig] = None) -> list[Path]:
    """Write per-run JSONL traces, the sweep metrics CSV, and one trajectory
    SVG per (slider, path, walls) group. Returns the created files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = config if config is not None else HarnessConfig()
    created: list[Path] = []

    csv_path = out / "metrics.csv"
    write_metrics_csv(records, csv_path)
    created.append(csv_path)

    for i, rec in enumerate(records):
        name = f"run_{i:04d}_{rec.controller}_{rec.scenario.label()}.jsonl"
        p = out / name
        write_trace_jsonl(rec, p)
        created.append(p)

    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        key = (rec.scenario.slider_kind, rec.scenario.path_name, rec.scenario.walls_enabled)
        groups.setdefault(key, []).append(rec)
    for (kind, path_name, walls_on), group in sorted(groups.items()):
        path = make_path(path_name, config)
        walls = make_walls(path_name, config) if walls_on else ()
        fname = f"trajectories_{kind}_{path_name}{'_walls' if walls_on else ''}.svg"
        p = out / fname
        write_overlay_svg(group, path, walls, p,
                          title=f"{kind} / {path_name}{' + walls' if walls_on else ''}")
        created.append(p)
    return created
