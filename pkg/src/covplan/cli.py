"""Command-line front end.

Subcommands: generate, plan, evaluate, sweep, render. Exit codes:
0 = success, 1 = unreadable or inconsistent input data, 2 = usage error
(bad flags or parameter ranges). Every source of randomness flows from
an explicit seed flag; there is no nondeterministic default.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from . import formats
from .envgen import EnvGenParams, generate_environment
from .errors import CovplanError, DataFormatError, ParameterError
from .estimate import SampleSet, interpolate
from .grid import Coord
from .metrics import evaluate
from .montecarlo import run_sweep
from .planner import PlanConfig, path_length, plan as build_plan


def _parse_coord(text: str) -> Coord:
    try:
        x, y = text.split(",")
        return Coord(int(x), int(y))
    except ValueError as exc:
        raise ParameterError(f"expected 'x,y' coordinate, got {text!r}") from exc


def _cmd_generate(args) -> int:
    params = EnvGenParams(
        width=args.width if args.width else args.size,
        height=args.height if args.height else args.size,
        distribution_density=args.dist_density,
        distribution_heterogeneity=args.dist_het,
        obstacle_density=args.obs_density,
        obstacle_heterogeneity=args.obs_het,
        threshold=args.threshold,
        seed=args.seed,
    )
    env = generate_environment(params)
    formats.save_environment(env, args.out)
    flags = []
    if env.distribution_best_effort:
        flags.append("distribution best-effort")
    if env.obstacle_best_effort:
        flags.append("obstacle best-effort")
    note = f" ({', '.join(flags)})" if flags else ""
    print(f"wrote {args.out}: distribution density "
          f"{env.distribution_density_achieved:.4f} (sigma {env.distribution_sigma:.3f}), "
          f"obstacle density {env.obstacle_density_achieved:.4f} "
          f"(sigma {env.obstacle_sigma:.3f}){note}")
    return 0


def _cmd_plan(args) -> int:
    env = formats.load_environment(args.env)
    config = PlanConfig(
        sample_spacing=args.spacing,
        start=_parse_coord(args.start) if args.start else None,
        preprocess=args.preprocess,
    )
    result = build_plan(env, config)
    length = path_length(result)
    formats.save_plan(result, length, args.out)
    pre = ""
    if result.preprocess is not None:
        pre = (f", removed {result.preprocess.removed_components} thin obstacles "
               f"({result.preprocess.removed_area} cells)")
    print(f"wrote {args.out}: length {length:.3f}, "
          f"{result.sample_count} samples, {len(result.cell_order)} cells{pre}")
    return 0


def _cmd_evaluate(args) -> int:
    env = formats.load_environment(args.env)
    result = formats.load_plan(args.plan)
    for c in result.path:
        if not env.obstacle_map.in_bounds(c.x, c.y):
            raise DataFormatError(f"plan coordinate {c} outside the environment")
    record = evaluate(env, result)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rmse", "hmr", "path_length", "sample_count", "hotspot_count"])
    writer.writerow([
        formats._fmt(record.rmse), formats._fmt(record.hmr),
        formats._fmt(record.path_length), formats._fmt(record.sample_count),
        formats._fmt(record.hotspot_count),
    ])
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(out.getvalue())
    if args.est_out:
        samples = SampleSet.from_field(result.samples, env.distribution)
        est = interpolate(samples, (env.width, env.height))
        formats.save_field(est.field, args.est_out)
    print(f"wrote {args.out}: rmse {formats._fmt(record.rmse) or 'undefined'}, "
          f"hmr {formats._fmt(record.hmr) or 'undefined'}, "
          f"length {record.path_length:.3f}, {record.sample_count} samples")
    return 0


def _cmd_sweep(args) -> int:
    config = formats.load_sweep_config(args.config)
    result = run_sweep(config, master_seed=args.master_seed, jobs=args.jobs)
    os.makedirs(args.out_dir, exist_ok=True)
    summary_path = os.path.join(args.out_dir, "summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(formats.summary_csv(result, config.trials_per_value))
    written = [summary_path]
    if args.trials_csv:
        trials_path = os.path.join(args.out_dir, "trials.csv")
        with open(trials_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(formats.trials_csv(result.trials))
        written.append(trials_path)
    invalid = sum(1 for row in result.trials if not row.valid)
    print(f"wrote {', '.join(written)}: {len(result.arms)} arms, "
          f"{len(result.trials)} trials, {invalid} invalid")
    return 0


def _cmd_render(args) -> int:
    env = formats.load_environment(args.env)
    result = None
    estimate_field = None
    if args.plan:
        result = formats.load_plan(args.plan)
        for c in list(result.path) + list(result.samples):
            if not env.obstacle_map.in_bounds(c.x, c.y):
                raise DataFormatError(f"plan coordinate {c} outside the environment")
    if args.estimate:
        estimate_field = formats.load_field(args.estimate)
    layers = formats.render_layers(env, result, estimate_field)
    paths = formats.save_render_layers(layers, args.out)
    print(f"wrote {len(paths)} layers: {', '.join(sorted(layers))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covplan",
        description="Coverage path planning over occupancy grids with a "
                    "seeded Monte-Carlo evaluation harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random environment file")
    p.add_argument("--size", type=int, default=30, help="square grid size (default 30)")
    p.add_argument("--width", type=int, help="grid width (overrides --size)")
    p.add_argument("--height", type=int, help="grid height (overrides --size)")
    p.add_argument("--dist-density", type=float, required=True)
    p.add_argument("--dist-het", type=float, required=True)
    p.add_argument("--obs-density", type=float, default=0.0)
    p.add_argument("--obs-het", type=float, default=0.1)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("plan", help="plan a coverage path for an environment")
    p.add_argument("env", help="environment file")
    p.add_argument("--spacing", type=int, required=True, help="sample spacing / path width")
    p.add_argument("--preprocess", action="store_true",
                   help="erase obstacles thinner than the spacing before planning")
    p.add_argument("--start", help="start coordinate as x,y (default: first free cell)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("evaluate", help="compute metrics for a plan")
    p.add_argument("env", help="environment file")
    p.add_argument("plan", help="plan file")
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.add_argument("--est-out", help="also write the estimated field")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="run a Monte-Carlo parameter sweep")
    p.add_argument("config", help="sweep configuration file (JSON)")
    p.add_argument("--master-seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--trials-csv", action="store_true", help="also write per-trial rows")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("render", help="emit plot-ready layer files")
    p.add_argument("env", help="environment file")
    p.add_argument("--plan", help="plan file")
    p.add_argument("--estimate", help="estimated field file")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CovplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
