#!/usr/bin/env python3
"""Re-derive every row of a per-trial sweep CSV and compare metrics.

Each valid row carries everything needed to reproduce its trial: the
resolved environment parameters, the environment seed, the plan
settings. This script regenerates the environment and the plan with the
package, then recomputes all four metrics with its own independent
code (double-loop RMSE, flood-fill hotspot matching, per-step length
fold) and compares against the recorded values.

Usage: verify_trials.py TRIALS_CSV [--tolerance 1e-12]
Exit status 0 when every row matches.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from covplan import (
    EnvGenParams,
    PlanConfig,
    SampleSet,
    generate_environment,
    interpolate,
    plan,
)


def flood_components(mask):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=int)
    count = 0
    for y0 in range(h):
        for x0 in range(w):
            if mask[y0, x0] and labels[y0, x0] == 0:
                count += 1
                stack = [(x0, y0)]
                labels[y0, x0] = count
                while stack:
                    x, y = stack.pop()
                    for dx in (-1, 0, 1):
                        for dy in (-1, 0, 1):
                            nx, ny = x + dx, y + dy
                            if 0 <= nx < w and 0 <= ny < h and mask[ny, nx] \
                                    and labels[ny, nx] == 0:
                                labels[ny, nx] = count
                                stack.append((nx, ny))
    return labels, count


def recompute(row):
    params = EnvGenParams(
        width=int(row["width"]), height=int(row["height"]),
        distribution_density=float(row["dist_density"]),
        distribution_heterogeneity=float(row["dist_heterogeneity"]),
        obstacle_density=float(row["obs_density"]),
        obstacle_heterogeneity=float(row["obs_heterogeneity"]),
        threshold=float(row["threshold"]),
        seed=int(row["env_seed"]),
    )
    env = generate_environment(params)
    result = plan(env, PlanConfig(sample_spacing=int(row["spacing"]),
                                  preprocess=row["preprocess"] == "1"))

    # path length: independent fold
    length = 0.0
    for (x0, y0), (x1, y1) in zip(result.path, result.path[1:]):
        length += math.sqrt(2.0) if (x0 != x1 and y0 != y1) else 1.0

    # rmse: package interpolation, independent double-loop error sum
    obstacles = env.obstacle_map.cells
    if result.samples:
        est = interpolate(SampleSet.from_field(result.samples, env.distribution),
                          (env.width, env.height)).field.values
        total = 0.0
        count = 0
        for y in range(env.height):
            for x in range(env.width):
                if obstacles[y, x] == 0:
                    d = env.distribution.values[y, x] - est[y, x]
                    total += d * d
                    count += 1
        rmse = math.sqrt(total / count) if count else None
    else:
        rmse = None

    # hmr: independent flood fill over visible hotspots
    visible = np.logical_and(env.hotspot_map != 0, obstacles == 0)
    labels, hotspot_count = flood_components(visible)
    if hotspot_count:
        hit = {labels[y, x] for x, y in result.samples if labels[y, x]}
        hmr = (hotspot_count - len(hit)) / hotspot_count
    else:
        hmr = None

    return rmse, hmr, length, len(result.samples), hotspot_count


def cell_matches(recorded: str, value, tolerance: float) -> bool:
    if recorded == "":
        return value is None
    if value is None:
        return False
    return abs(float(recorded) - float(value)) <= tolerance


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("trials_csv")
    parser.add_argument("--tolerance", type=float, default=1e-12)
    args = parser.parse_args(argv)

    mismatches = 0
    checked = 0
    with open(args.trials_csv, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            if row["valid"] != "1":
                continue
            checked += 1
            rmse, hmr, length, samples, hotspots = recompute(row)
            pairs = [
                ("rmse", row["rmse"], rmse),
                ("hmr", row["hmr"], hmr),
                ("path_length", row["path_length"], length),
                ("sample_count", row["sample_count"], samples),
                ("hotspot_count", row["hotspot_count"], hotspots),
            ]
            for name, recorded, value in pairs:
                if not cell_matches(recorded, value, args.tolerance):
                    mismatches += 1
                    print(f"MISMATCH arm {row['arm_index']} trial {row['trial_index']} "
                          f"{name}: recorded {recorded!r}, recomputed {value!r}")
    print(f"verified {checked} trials: "
          f"{'all match' if mismatches == 0 else f'{mismatches} mismatches'}")
    return 0 if mismatches == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
