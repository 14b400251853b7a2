"""Text file formats: environments, plans, fields, render layers, CSV.

All formats are UTF-8 text with LF line endings and are written
canonically, so re-running any command with identical inputs overwrites
outputs with identical bytes. Coordinates follow the package
convention: origin top-left, x = column, y = row.

Environment files are a single JSON document::

    {"format": "covplan-environment", "version": 1,
     "header": {"width": ..., "height": ..., "seed": ...,
                "params": {"distribution_density": ..., ...}},
     "achieved": {"distribution_sigma": ..., ...},
     "distribution": [... row-major reals, 9 significant digits ...],
     "hotspot": [... row-major 0/1 ...],
     "obstacle": [... row-major 0/1 ...]}

Distribution values are rounded to 9 significant digits on write; a
load/save cycle is lossless at that precision.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

import numpy as np

from .envgen import EnvGenParams, EnvironmentBundle
from .errors import DataFormatError
from .grid import Coord, OccupancyGrid, ScalarField
from .montecarlo import EnvArm, ParamSpec, SweepConfig, SweepResult, TrialRow
from .planner import Plan, PlanSegment, PreprocessReport

ENV_FORMAT = "covplan-environment"
PLAN_FORMAT = "covplan-plan"
FIELD_MAGIC = "covplan-field"

_PARAM_FIELDS = (
    "distribution_density", "distribution_heterogeneity",
    "obstacle_density", "obstacle_heterogeneity", "threshold",
)


def _round9(value: float) -> float:
    return float("%.9g" % value)


def _fmt(value) -> str:
    """Canonical CSV cell: empty for None, repr for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _fmt_spec(spec: ParamSpec) -> str:
    if isinstance(spec, tuple):
        return f"{_fmt(spec[0])}:{_fmt(spec[1])}"
    return _fmt(spec)


# ---------------------------------------------------------------------------
# Environment files

def environment_to_text(env: EnvironmentBundle) -> str:
    params = env.params
    doc = {
        "format": ENV_FORMAT,
        "version": 1,
        "header": {
            "width": params.width,
            "height": params.height,
            "seed": int(params.seed),
            "params": {name: getattr(params, name) for name in _PARAM_FIELDS},
        },
        "achieved": {
            "distribution_sigma": env.distribution_sigma,
            "obstacle_sigma": env.obstacle_sigma,
            "distribution_density": env.distribution_density_achieved,
            "obstacle_density": env.obstacle_density_achieved,
            "distribution_best_effort": env.distribution_best_effort,
            "obstacle_best_effort": env.obstacle_best_effort,
        },
        "distribution": [_round9(v) for v in env.distribution.values.ravel()],
        "hotspot": [int(v) for v in env.hotspot_map.ravel()],
        "obstacle": [int(v) for v in env.obstacle_map.cells.ravel()],
    }
    return json.dumps(doc) + "\n"


def save_environment(env: EnvironmentBundle, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(environment_to_text(env))


def load_environment(path) -> EnvironmentBundle:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != ENV_FORMAT:
        raise DataFormatError(f"{path}: not a {ENV_FORMAT} document")
    try:
        header = doc["header"]
        width = int(header["width"])
        height = int(header["height"])
        params = EnvGenParams(
            width=width, height=height, seed=int(header["seed"]),
            **{name: float(header["params"][name]) for name in _PARAM_FIELDS},
        )
        achieved = doc["achieved"]
        size = width * height
        for key in ("distribution", "hotspot", "obstacle"):
            if len(doc[key]) != size:
                raise DataFormatError(
                    f"{path}: {key} has {len(doc[key])} values, expected {size}")
        distribution = ScalarField(
            np.asarray(doc["distribution"], dtype=np.float64).reshape(height, width))
        hotspot = np.asarray(doc["hotspot"], dtype=np.uint8).reshape(height, width)
        hotspot.flags.writeable = False
        obstacle = OccupancyGrid(
            np.asarray(doc["obstacle"], dtype=np.uint8).reshape(height, width))
        return EnvironmentBundle(
            distribution=distribution,
            hotspot_map=hotspot,
            obstacle_map=obstacle,
            params=params,
            distribution_sigma=float(achieved["distribution_sigma"]),
            obstacle_sigma=float(achieved["obstacle_sigma"]),
            distribution_density_achieved=float(achieved["distribution_density"]),
            obstacle_density_achieved=float(achieved["obstacle_density"]),
            distribution_best_effort=bool(achieved["distribution_best_effort"]),
            obstacle_best_effort=bool(achieved["obstacle_best_effort"]),
        )
    except DataFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed environment file ({exc})") from exc


# ---------------------------------------------------------------------------
# Plan files

def plan_to_text(plan: Plan, length: float) -> str:
    doc = {
        "format": PLAN_FORMAT,
        "version": 1,
        "sample_spacing": plan.sample_spacing,
        "path": [[c.x, c.y] for c in plan.path],
        "samples": [[c.x, c.y] for c in plan.samples],
        "segments": [[s.cell_id, s.start, s.end] for s in plan.segments],
        "cell_order": list(plan.cell_order),
        "summary": {
            "path_length": length,
            "sample_count": plan.sample_count,
        },
        "preprocess": None if plan.preprocess is None else {
            "removed_components": plan.preprocess.removed_components,
            "removed_area": plan.preprocess.removed_area,
            "skip_events": plan.preprocess.skip_events,
            "dropped_samples": plan.preprocess.dropped_samples,
        },
    }
    return json.dumps(doc) + "\n"


def save_plan(plan: Plan, length: float, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(plan_to_text(plan, length))


def load_plan(path) -> Plan:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != PLAN_FORMAT:
        raise DataFormatError(f"{path}: not a {PLAN_FORMAT} document")
    try:
        pre = doc["preprocess"]
        report = None if pre is None else PreprocessReport(
            removed_components=int(pre["removed_components"]),
            removed_area=int(pre["removed_area"]),
            skip_events=int(pre["skip_events"]),
            dropped_samples=int(pre["dropped_samples"]),
        )
        return Plan(
            path=tuple(Coord(int(x), int(y)) for x, y in doc["path"]),
            samples=tuple(Coord(int(x), int(y)) for x, y in doc["samples"]),
            segments=tuple(PlanSegment(cell_id=int(c), start=int(a), end=int(b))
                           for c, a, b in doc["segments"]),
            cell_order=tuple(int(c) for c in doc["cell_order"]),
            sample_spacing=int(doc["sample_spacing"]),
            preprocess=report,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed plan file ({exc})") from exc


# ---------------------------------------------------------------------------
# Scalar fields (estimate export)

def field_to_text(field: ScalarField) -> str:
    lines = [f"{FIELD_MAGIC} {field.width} {field.height}"]
    for row in field.values:
        lines.append(" ".join("%.9g" % v for v in row))
    return "\n".join(lines) + "\n"


def save_field(field: ScalarField, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(field_to_text(field))


def load_field(path) -> ScalarField:
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise DataFormatError(f"{path}: empty field file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != FIELD_MAGIC:
        raise DataFormatError(f"{path}: not a {FIELD_MAGIC} file")
    try:
        width, height = int(head[1]), int(head[2])
        rows = [[float(v) for v in line.split()] for line in lines[1:height + 1]]
        arr = np.asarray(rows, dtype=np.float64)
        if arr.shape != (height, width):
            raise DataFormatError(f"{path}: expected {height}x{width} values")
        return ScalarField(arr)
    except DataFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed field file ({exc})") from exc


# ---------------------------------------------------------------------------
# Cell-set debug dump

def cellset_to_text(cellset) -> str:
    """Per-cell boundary listing for golden-file comparisons."""
    lines = [f"cells {len(cellset.cells)} grid {cellset.width}x{cellset.height}"]
    for cell in cellset.cells:
        lines.append(f"cell {cell.id} columns {cell.x_left}..{cell.x_right}")
        lines.append("  ceiling " + " ".join(str(v) for v in cell.ceiling))
        lines.append("  floor   " + " ".join(str(v) for v in cell.floor))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Render layers (plot data)

def render_layers(env: EnvironmentBundle, plan: Plan | None = None,
                  estimate: ScalarField | None = None) -> dict[str, str]:
    """Layered plot data keyed by layer name.

    Rasters (distribution, obstacles, error) are H lines of W
    comma-separated values; the error layer holds ``nan`` at
    obstacle-covered cells. Point layers (path, samples) are CSV with an
    ``x,y`` header, one coordinate per line, in path order.
    """
    layers = {}
    layers["distribution"] = "\n".join(
        ",".join("%.9g" % v for v in row) for row in env.distribution.values) + "\n"
    layers["obstacles"] = "\n".join(
        ",".join(str(int(v)) for v in row) for row in env.obstacle_map.cells) + "\n"
    if plan is not None:
        layers["path"] = "x,y\n" + "".join(f"{c.x},{c.y}\n" for c in plan.path)
        layers["samples"] = "x,y\n" + "".join(f"{c.x},{c.y}\n" for c in plan.samples)
    if estimate is not None:
        if (estimate.width, estimate.height) != (env.width, env.height):
            raise DataFormatError("estimate dimensions do not match environment")
        error = np.abs(env.distribution.values - estimate.values)
        mask = env.obstacle_map.cells != 0
        rows = []
        for y in range(env.height):
            rows.append(",".join(
                "nan" if mask[y, x] else "%.9g" % error[y, x]
                for x in range(env.width)))
        layers["error"] = "\n".join(rows) + "\n"
    return layers


def save_render_layers(layers: dict[str, str], prefix: str) -> list[str]:
    paths = []
    for name, text in layers.items():
        path = f"{prefix}.{name}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Sweep configuration

def _parse_spec(value) -> ParamSpec:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise DataFormatError(f"parameter range must have 2 entries, got {value}")
        return (float(value[0]), float(value[1]))
    return float(value)


def load_sweep_config(path) -> SweepConfig:
    """Read a sweep configuration; keys mirror SweepConfig fields 1:1."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON ({exc})") from exc
    try:
        arms = tuple(
            EnvArm(
                distribution_density=_parse_spec(arm["distribution_density"]),
                distribution_heterogeneity=_parse_spec(arm["distribution_heterogeneity"]),
                obstacle_density=_parse_spec(arm["obstacle_density"]),
                obstacle_heterogeneity=_parse_spec(arm["obstacle_heterogeneity"]),
            )
            for arm in doc["env_arms"])
        return SweepConfig(
            swept_parameter=str(doc["swept_parameter"]),
            values=tuple(doc["values"]),
            trials_per_value=int(doc["trials_per_value"]),
            env_arms=arms,
            preprocess_arms=tuple(bool(v) for v in doc.get("preprocess_arms", [False])),
            width=int(doc.get("width", 30)),
            height=int(doc.get("height", 30)),
            threshold=float(doc.get("threshold", 0.5)),
            sample_spacing=int(doc.get("sample_spacing", 1)),
        )
    except DataFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed sweep config ({exc})") from exc


# ---------------------------------------------------------------------------
# Sweep CSV output

SUMMARY_COLUMNS = (
    "spacing", "dist_density", "dist_heterogeneity", "obs_density",
    "obs_heterogeneity", "preprocess", "N", "N_valid",
    "rmse_mean", "rmse_std", "rmse_stderr",
    "hmr_mean", "hmr_std", "hmr_stderr",
    "path_length_mean", "path_length_std", "path_length_stderr",
    "sample_count_mean", "sample_count_std", "sample_count_stderr",
)

TRIAL_COLUMNS = (
    "arm_index", "trial_index", "width", "height", "threshold",
    "dist_density", "dist_heterogeneity", "obs_density", "obs_heterogeneity",
    "spacing", "preprocess", "env_seed", "attempts", "valid",
    "rmse", "hmr", "path_length", "sample_count", "hotspot_count",
)


def summary_csv(result: SweepResult, trials_per_value: int) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    n = trials_per_value
    for arm, stats in zip(result.arms, result.stats):
        n_valid = sum(1 for row in result.trials
                      if row.config.arm_index == arm.arm_index and row.valid)
        cells = [
            _fmt(arm.spacing),
            _fmt_spec(arm.env_arm.distribution_density),
            _fmt_spec(arm.env_arm.distribution_heterogeneity),
            _fmt_spec(arm.env_arm.obstacle_density),
            _fmt_spec(arm.env_arm.obstacle_heterogeneity),
            _fmt(arm.preprocess),
            _fmt(n),
            _fmt(n_valid),
        ]
        for metric in (stats.rmse, stats.hmr, stats.path_length, stats.sample_count):
            cells.extend([_fmt(metric.mean), _fmt(metric.std), _fmt(metric.stderr)])
        writer.writerow(cells)
    return out.getvalue()


def trials_csv(rows: Sequence[TrialRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRIAL_COLUMNS)
    for row in rows:
        cfg = row.config
        record = row.record
        params = row.params
        writer.writerow([
            _fmt(cfg.arm_index), _fmt(cfg.trial_index),
            _fmt(cfg.width), _fmt(cfg.height), _fmt(cfg.threshold),
            _fmt(params.distribution_density if params else None),
            _fmt(params.distribution_heterogeneity if params else None),
            _fmt(params.obstacle_density if params else None),
            _fmt(params.obstacle_heterogeneity if params else None),
            _fmt(cfg.plan_config.sample_spacing),
            _fmt(cfg.plan_config.preprocess),
            _fmt(params.seed if params else None),
            _fmt(row.attempts),
            _fmt(row.valid),
            _fmt(record.rmse if record else None),
            _fmt(record.hmr if record else None),
            _fmt(record.path_length if record else None),
            _fmt(record.sample_count if record else None),
            _fmt(record.hotspot_count if record else None),
        ])
    return out.getvalue()
