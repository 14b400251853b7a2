"""Randomized environment synthesis.

Each map starts from an i.i.d. uniform seed field, is scaled
exponentially by a heterogeneity parameter (sharper spread for small
values), smoothed by a Gaussian filter whose width is solved so that the
thresholded map hits a target density, and finally min-max rescaled to
[0, 1]. The binary map (hotspots or obstacles) is the rescaled field
thresholded at ``threshold``; the analyte distribution is the smooth
rescaled field itself.

Randomness discipline: a bundle is a pure function of its parameters.
The 64-bit ``seed`` feeds a ``numpy.random.SeedSequence`` whose first
two spawned children drive the distribution map and the obstacle map in
that order, so the two maps are independent and the whole bundle is
reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ParameterError
from .grid import OccupancyGrid, ScalarField

DEFAULT_THRESHOLD = 0.5
DENSITY_TOLERANCE = 0.02
SIGMA_SEARCH_ITERATIONS = 40


@dataclass(frozen=True)
class EnvGenParams:
    """Generator parameters for one environment."""

    width: int
    height: int
    distribution_density: float
    distribution_heterogeneity: float
    obstacle_density: float
    obstacle_heterogeneity: float
    threshold: float = DEFAULT_THRESHOLD
    seed: int = 0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ParameterError("width and height must be positive")
        if not 0.0 < self.distribution_density < 1.0:
            raise ParameterError("distribution_density must be in (0, 1)")
        if self.distribution_heterogeneity <= 0.0:
            raise ParameterError("distribution_heterogeneity must be > 0")
        if not 0.0 <= self.obstacle_density < 1.0:
            raise ParameterError("obstacle_density must be in [0, 1)")
        if self.obstacle_heterogeneity <= 0.0:
            raise ParameterError("obstacle_heterogeneity must be > 0")
        if not 0.0 < self.threshold < 1.0:
            raise ParameterError("threshold must be in (0, 1)")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ParameterError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class DensitySolveResult:
    """Outcome of the filter-width search for a target density."""

    smoothed: ScalarField
    sigma: float
    achieved_density: float
    best_effort: bool


@dataclass(frozen=True)
class EnvironmentBundle:
    """One generated environment: smooth distribution + binary maps."""

    distribution: ScalarField
    hotspot_map: np.ndarray
    obstacle_map: OccupancyGrid
    params: EnvGenParams
    distribution_sigma: float
    obstacle_sigma: float
    distribution_density_achieved: float
    obstacle_density_achieved: float
    distribution_best_effort: bool
    obstacle_best_effort: bool

    @property
    def width(self) -> int:
        return self.params.width

    @property
    def height(self) -> int:
        return self.params.height


def seed_field(width: int, height: int, rng: np.random.Generator) -> ScalarField:
    """Fill a field with i.i.d. uniform [0, 1) draws from ``rng``."""
    if width <= 0 or height <= 0:
        raise ParameterError("field dimensions must be positive")
    return ScalarField(rng.random((height, width)))


def heterogeneity_scale(field: ScalarField, h: float) -> ScalarField:
    """Exponential rescaling 10**(-s/h) of a [0, 1] seed field.

    Small h concentrates mass near zero with a few sharp peaks; large h
    flattens the map. Output values lie in (0, 1], hitting 1 exactly
    where the seed is 0.
    """
    if h <= 0.0:
        raise ParameterError("heterogeneity must be > 0")
    return ScalarField(np.power(10.0, -field.values / h))


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = max(1, int(math.ceil(4.0 * sigma)))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_smooth(field: ScalarField, sigma: float) -> ScalarField:
    """Separable Gaussian blur with reflected (edge-repeating) borders.

    sigma = 0 is the identity. The kernel is the sampled Gaussian
    truncated at ceil(4*sigma) and normalized to sum 1, so constant
    fields are fixed points.
    """
    if sigma < 0.0:
        raise ParameterError("sigma must be >= 0")
    if sigma == 0.0:
        return ScalarField(field.values)
    k = _gaussian_kernel(sigma)
    r = (len(k) - 1) // 2
    out = np.pad(field.values, ((r, r), (0, 0)), mode="symmetric")
    out = sliding_window_view(out, len(k), axis=0) @ k
    out = np.pad(out, ((0, 0), (r, r)), mode="symmetric")
    out = sliding_window_view(out, len(k), axis=1) @ k
    return ScalarField(out)


def rescale_unit(field: ScalarField) -> ScalarField:
    """Min-max rescale to [0, 1]; constant fields map to 0.5 everywhere."""
    lo = float(field.values.min())
    hi = float(field.values.max())
    if hi == lo:
        return ScalarField(np.full_like(field.values, 0.5))
    return ScalarField((field.values - lo) / (hi - lo))


def _thresholded_density(smoothed: ScalarField, threshold: float) -> float:
    scaled = rescale_unit(smoothed)
    return float(np.count_nonzero(scaled.values > threshold)) / scaled.values.size


def solve_density_sigma(raw: ScalarField, density: float,
                        threshold: float = DEFAULT_THRESHOLD,
                        sigma_max: float | None = None,
                        iterations: int = SIGMA_SEARCH_ITERATIONS,
                        tolerance: float = DENSITY_TOLERANCE) -> DensitySolveResult:
    """Find the blur width whose thresholded map is nearest ``density``.

    The thresholded density is only near-monotone in sigma (it has
    plateaus and local bumps), so the search scans a coarse sigma grid
    over [0, sigma_max] to locate a crossing of the target and then
    bisects inside the bracketing pair, spending ``iterations``
    smoothing evaluations in total. The best sigma visited is returned;
    ``best_effort`` is set whenever the achieved density misses the
    target by more than ``tolerance`` (e.g. targets outside the
    reachable range).
    """
    if not 0.0 < density < 1.0:
        raise ParameterError("target density must be in (0, 1)")
    if sigma_max is None:
        sigma_max = float(max(raw.width, raw.height))

    evaluated: dict[float, float] = {}

    def measure(sigma: float) -> float:
        if sigma not in evaluated:
            evaluated[sigma] = _thresholded_density(gaussian_smooth(raw, sigma), threshold)
        return evaluated[sigma]

    scan_points = min(25, max(2, (iterations * 5) // 8))
    scan = [sigma_max * i / (scan_points - 1) for i in range(scan_points)]
    bracket = None
    for lo, hi in zip(scan, scan[1:]):
        a = measure(lo) - density
        b = measure(hi) - density
        if a == 0.0 or b == 0.0:
            break
        if (a < 0.0) != (b < 0.0):
            bracket = (lo, hi, a < 0.0)
            break
    if bracket is not None:
        lo, hi, lo_below = bracket
        for _ in range(max(0, iterations - scan_points)):
            mid = 0.5 * (lo + hi)
            if (measure(mid) < density) == lo_below:
                lo = mid
            else:
                hi = mid

    best_sigma = min(evaluated, key=lambda s: (abs(evaluated[s] - density), s))
    achieved = evaluated[best_sigma]
    smoothed = gaussian_smooth(raw, best_sigma)
    return DensitySolveResult(
        smoothed=smoothed,
        sigma=best_sigma,
        achieved_density=achieved,
        best_effort=abs(achieved - density) > tolerance,
    )


def _generate_binary_pipeline(width: int, height: int, density: float,
                              heterogeneity: float, threshold: float,
                              rng: np.random.Generator):
    raw = heterogeneity_scale(seed_field(width, height, rng), heterogeneity)
    solved = solve_density_sigma(raw, density, threshold)
    scaled = rescale_unit(solved.smoothed)
    binary = (scaled.values > threshold).astype(np.uint8)
    return scaled, binary, solved


def generate_environment(params: EnvGenParams) -> EnvironmentBundle:
    """Generate a full environment bundle from parameters alone.

    The distribution map and the obstacle map run the same
    seed -> scale -> smooth -> threshold pipeline on independent RNG
    substreams. ``obstacle_density`` = 0 short-circuits to an all-free
    obstacle grid.
    """
    root = np.random.SeedSequence(int(params.seed))
    dist_ss, obs_ss = root.spawn(2)

    scaled, hotspots, solved = _generate_binary_pipeline(
        params.width, params.height,
        params.distribution_density, params.distribution_heterogeneity,
        params.threshold, np.random.default_rng(dist_ss),
    )

    if params.obstacle_density == 0.0:
        obstacle = OccupancyGrid.empty(params.width, params.height)
        obs_sigma = 0.0
        obs_achieved = 0.0
        obs_flag = False
    else:
        _, obstacle_cells, obs_solved = _generate_binary_pipeline(
            params.width, params.height,
            params.obstacle_density, params.obstacle_heterogeneity,
            params.threshold, np.random.default_rng(obs_ss),
        )
        obstacle = OccupancyGrid(obstacle_cells)
        obs_sigma = obs_solved.sigma
        obs_achieved = obs_solved.achieved_density
        obs_flag = obs_solved.best_effort

    hotspots.flags.writeable = False
    return EnvironmentBundle(
        distribution=scaled,
        hotspot_map=hotspots,
        obstacle_map=obstacle,
        params=params,
        distribution_sigma=solved.sigma,
        obstacle_sigma=obs_sigma,
        distribution_density_achieved=solved.achieved_density,
        obstacle_density_achieved=obs_achieved,
        distribution_best_effort=solved.best_effort,
        obstacle_best_effort=obs_flag,
    )
