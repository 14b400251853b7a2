"""Grid primitives shared by the whole toolkit.

Coordinate convention (also fixed in the file formats): origin at the
top-left corner, ``x`` is the column index growing rightward, ``y`` is
the row index growing downward. Arrays are indexed ``arr[y, x]``.

All types are immutable after construction and all operations are pure,
so everything here is safe to use concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import BoundsError, ParameterError

SQRT2 = math.sqrt(2.0)

# Neighbor offsets (dx, dy) in fixed order: N, E, S, W, NE, SE, SW, NW.
NEIGHBOR_OFFSETS = ((0, -1), (1, 0), (0, 1), (-1, 0), (1, -1), (1, 1), (-1, 1), (-1, -1))


class Coord(NamedTuple):
    """Grid coordinate; x = column, y = row."""

    x: int
    y: int


def _check_connectivity(connectivity: int) -> int:
    if connectivity not in (4, 8):
        raise ParameterError(f"connectivity must be 4 or 8, got {connectivity}")
    return connectivity


def _as_binary_array(cells) -> np.ndarray:
    arr = np.asarray(cells)
    if arr.ndim != 2 or arr.size == 0:
        raise ParameterError("grid must be a non-empty 2D array")
    if not np.logical_or(arr == 0, arr == 1).all():
        raise ParameterError("grid values must be exactly 0 or 1")
    out = np.ascontiguousarray(arr, dtype=np.uint8)
    if out is arr:
        out = out.copy()
    out.flags.writeable = False
    return out


class OccupancyGrid:
    """Binary obstacle grid: 1 = obstacle, 0 = traversable."""

    __slots__ = ("cells",)

    def __init__(self, cells) -> None:
        self.cells = _as_binary_array(cells)

    @classmethod
    def empty(cls, width: int, height: int) -> "OccupancyGrid":
        if width <= 0 or height <= 0:
            raise ParameterError("grid dimensions must be positive")
        return cls(np.zeros((height, width), dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, x: int, y: int) -> bool:
        return self.cells[y, x] == 0

    def free_count(self) -> int:
        return int(self.cells.size - self.cells.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, OccupancyGrid) and np.array_equal(self.cells, other.cells)

    def __repr__(self) -> str:
        return f"OccupancyGrid({self.width}x{self.height}, {int(self.cells.sum())} obstacles)"


class ScalarField:
    """Real-valued grid, e.g. an analyte distribution (true or estimated)."""

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ParameterError("field must be a non-empty 2D array")
        if not np.isfinite(arr).all():
            raise ParameterError("field values must all be finite")
        arr = np.ascontiguousarray(arr)
        if arr is np.asarray(values):
            arr = arr.copy()
        arr.flags.writeable = False
        self.values = arr

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, ScalarField) and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"ScalarField({self.width}x{self.height})"


@dataclass(frozen=True)
class LabelGrid:
    """Connected-component labels: 0 = background, components 1..count."""

    labels: np.ndarray
    count: int

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


def neighbors(dims: tuple[int, int], c: Coord, connectivity: int = 8) -> list[Coord]:
    """In-bounds neighbors of ``c`` on a (width, height) grid.

    Order is deterministic: N, E, S, W, then NE, SE, SW, NW.
    """
    _check_connectivity(connectivity)
    width, height = dims
    x, y = c
    if not (0 <= x < width and 0 <= y < height):
        raise BoundsError(f"coordinate {c} outside {width}x{height} grid")
    out = []
    for dx, dy in NEIGHBOR_OFFSETS[: 4 if connectivity == 4 else 8]:
        nx, ny = x + dx, y + dy
        if 0 <= nx < width and 0 <= ny < height:
            out.append(Coord(nx, ny))
    return out


def connected_components(mask, connectivity: int = 8) -> LabelGrid:
    """Label the 1-cells of a binary mask.

    Two 1-cells share a label iff they are connected under the given
    connectivity. Labels are dense from 1 in row-major order of first
    appearance, which makes the output independent of traversal details.
    """
    _check_connectivity(connectivity)
    if isinstance(mask, OccupancyGrid):
        mask = mask.cells
    mask = _as_binary_array(mask)
    labels, count = kernels.label_components(mask, connectivity)
    labels.flags.writeable = False
    return LabelGrid(labels=labels, count=count)


def distance_field(grid: OccupancyGrid, source: Coord,
                   connectivity: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Dijkstra distances and parents from ``source`` over free cells.

    Returns (dist, parent) grids; dist holds +inf where unreachable and
    parent holds flat predecessor indices (-1 at the source and
    unreachable cells). Cardinal moves cost 1, diagonal moves sqrt(2).
    """
    _check_connectivity(connectivity)
    x, y = source
    if not grid.in_bounds(x, y):
        raise BoundsError(f"source {source} outside {grid.width}x{grid.height} grid")
    if not grid.is_free(x, y):
        raise ParameterError(f"source {source} is an obstacle cell")
    return kernels.dijkstra_grid(grid.cells, x, y, connectivity)


def reconstruct_path(parent: np.ndarray, source: Coord, goal: Coord) -> list[Coord]:
    """Walk the parent grid from ``goal`` back to ``source``."""
    w = parent.shape[1]
    flat = parent.ravel()
    path = [goal]
    idx = goal.y * w + goal.x
    src_idx = source.y * w + source.x
    while idx != src_idx:
        idx = int(flat[idx])
        path.append(Coord(idx % w, idx // w))
    path.reverse()
    return path


def shortest_path(grid: OccupancyGrid, start: Coord, goal: Coord,
                  connectivity: int = 8) -> list[Coord] | None:
    """Minimum-cost obstacle-free path from start to goal, or None.

    Both endpoints must be free cells. Returns the coordinate sequence
    including both endpoints; ``path_cost`` recovers its length.
    """
    gx, gy = goal
    if not grid.in_bounds(gx, gy):
        raise BoundsError(f"goal {goal} outside {grid.width}x{grid.height} grid")
    if not grid.is_free(gx, gy):
        raise ParameterError(f"goal {goal} is an obstacle cell")
    start = Coord(*start)
    goal = Coord(*goal)
    dist, parent = distance_field(grid, start, connectivity)
    if not np.isfinite(dist[goal.y, goal.x]):
        return None
    return reconstruct_path(parent, start, goal)


def path_cost(path: Sequence[Coord]) -> float:
    """Sum of per-step costs: 1 for cardinal steps, sqrt(2) for diagonal."""
    total = 0.0
    for (x0, y0), (x1, y1) in zip(path, path[1:]):
        dx = abs(x1 - x0)
        dy = abs(y1 - y0)
        if dx > 1 or dy > 1 or (dx == 0 and dy == 0):
            raise ParameterError(f"({x0},{y0}) -> ({x1},{y1}) is not a unit step")
        total += SQRT2 if (dx == 1 and dy == 1) else 1.0
    return total
