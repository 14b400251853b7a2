import os

import numpy as np
import pytest

from covplan import EnvGenParams, EnvironmentBundle, OccupancyGrid, ScalarField

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def grid_from_strings(rows):
    """Build an OccupancyGrid from strings of 0/1 or ./# characters."""
    data = [[1 if ch in "1#" else 0 for ch in row] for row in rows]
    return OccupancyGrid(np.asarray(data, dtype=np.uint8))


def make_env(obstacles, distribution=None, hotspots=None, seed=0):
    """Assemble an EnvironmentBundle around a hand-made obstacle grid."""
    if not isinstance(obstacles, OccupancyGrid):
        obstacles = OccupancyGrid(np.asarray(obstacles, dtype=np.uint8))
    h, w = obstacles.height, obstacles.width
    if distribution is None:
        distribution = ScalarField(np.full((h, w), 0.5))
    elif not isinstance(distribution, ScalarField):
        distribution = ScalarField(np.asarray(distribution, dtype=float))
    if hotspots is None:
        hotspots = (distribution.values > 0.5).astype(np.uint8)
    params = EnvGenParams(width=w, height=h, distribution_density=0.5,
                          distribution_heterogeneity=0.1, obstacle_density=0.0,
                          obstacle_heterogeneity=0.1, seed=seed)
    return EnvironmentBundle(
        distribution=distribution, hotspot_map=np.asarray(hotspots, dtype=np.uint8),
        obstacle_map=obstacles, params=params,
        distribution_sigma=0.0, obstacle_sigma=0.0,
        distribution_density_achieved=float((distribution.values > 0.5).mean()),
        obstacle_density_achieved=float(obstacles.cells.mean()),
        distribution_best_effort=False, obstacle_best_effort=False,
    )


@pytest.fixture
def spiral_grid():
    with open(os.path.join(FIXTURES, "spiral_map.txt")) as f:
        rows = [line.strip() for line in f if line.strip()]
    return grid_from_strings(rows)
