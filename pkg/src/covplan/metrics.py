"""Plan performance metrics: RMSE, hotspot miss rate, effort.

Accuracy metrics ignore obstacle-covered locations entirely. Metrics
that have no defined value (no hotspots, everything masked) are
reported as None, never coerced to 0, so aggregation can exclude them
explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .envgen import EnvironmentBundle
from .errors import ParameterError
from .estimate import SampleSet, interpolate
from .grid import Coord, ScalarField, connected_components
from .planner import Plan, path_length


@dataclass(frozen=True)
class MetricsRecord:
    """All four metrics for one (environment, plan) pair."""

    rmse: float | None
    hmr: float | None
    path_length: float
    sample_count: int
    hotspot_count: int


def rmse(true_field: ScalarField, est_field: ScalarField, obstacle_mask) -> float | None:
    """Root-mean-squared error over non-obstacle locations.

    Returns None when every location is masked.
    """
    mask = np.asarray(obstacle_mask) != 0
    if true_field.values.shape != est_field.values.shape or mask.shape != true_field.values.shape:
        raise ParameterError("field and mask dimensions must match")
    keep = ~mask
    m = int(keep.sum())
    if m == 0:
        return None
    diff = true_field.values[keep] - est_field.values[keep]
    return float(np.sqrt((diff * diff).sum() / m))


def hotspot_miss_rate(hotspot_map, samples: Sequence[Coord],
                      obstacle_mask) -> tuple[float | None, int]:
    """Fraction of hotspots containing no sample, plus the hotspot count.

    Hotspots are 8-connected components of the hotspot map with
    obstacle-covered cells removed first; a component entirely under
    obstacles therefore does not count. Returns (None, 0) when there are
    no hotspots.
    """
    hotspot_map = np.asarray(hotspot_map)
    mask = np.asarray(obstacle_mask) != 0
    if hotspot_map.shape != mask.shape:
        raise ParameterError("hotspot map and mask dimensions must match")
    visible = np.logical_and(hotspot_map != 0, ~mask).astype(np.uint8)
    labels = connected_components(visible, connectivity=8)
    if labels.count == 0:
        return None, 0
    hit = np.zeros(labels.count + 1, dtype=bool)
    for x, y in samples:
        hit[labels.labels[y, x]] = True
    missed = labels.count - int(hit[1:].sum())
    return missed / labels.count, labels.count


def evaluate(env: EnvironmentBundle, plan: Plan) -> MetricsRecord:
    """Measure one plan against its environment.

    Reads exact values of the true distribution at the sample
    coordinates, reconstructs the field, and computes all four metrics.
    A plan with no samples has undefined RMSE.
    """
    hmr, hotspot_count = hotspot_miss_rate(env.hotspot_map, plan.samples,
                                           env.obstacle_map.cells)
    if plan.samples:
        samples = SampleSet.from_field(plan.samples, env.distribution)
        est = interpolate(samples, (env.width, env.height))
        err = rmse(env.distribution, est.field, env.obstacle_map.cells)
    else:
        err = None
    return MetricsRecord(
        rmse=err,
        hmr=hmr,
        path_length=path_length(plan),
        sample_count=plan.sample_count,
        hotspot_count=hotspot_count,
    )
