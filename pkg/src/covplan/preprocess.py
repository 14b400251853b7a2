"""Thin-obstacle preprocessing and executed-path correction.

Obstacles narrower than the path width fragment the decomposition into
slivers that force dense rastering, so they are erased from the grid
before decomposition. The planned path may then cross those erased
obstacles; ``correct_path`` repairs it afterwards by splicing in
shortest detours on the original grid, which is the path the robot
actually executes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError
from .grid import Coord, OccupancyGrid, connected_components, distance_field, reconstruct_path


@dataclass(frozen=True)
class PreprocessResult:
    """Thin-obstacle removal output."""

    planning_grid: OccupancyGrid
    removed_mask: np.ndarray
    removed_component_count: int

    @property
    def removed_area(self) -> int:
        return int(self.removed_mask.sum())


@dataclass(frozen=True)
class ReplacedRun:
    """One illegal span of the raw path and the detour that replaced it.

    ``start``/``end`` are raw-path indices (inclusive) and ``detour`` is
    the spliced coordinate bridge including both legal endpoints.
    """

    start: int
    end: int
    detour: tuple[Coord, ...]


@dataclass(frozen=True)
class CorrectionResult:
    """Executed path after detouring around erased obstacles."""

    path: list[Coord]
    index_map: list[int | None]
    replaced_runs: tuple[ReplacedRun, ...]
    skipped_spans: tuple[tuple[int, int], ...]

    @property
    def skip_events(self) -> int:
        return len(self.skipped_spans)


def obstacle_width(component: Iterable[Coord]) -> int:
    """Width of an obstacle component: min side of its bounding box."""
    xs = []
    ys = []
    for x, y in component:
        xs.append(x)
        ys.append(y)
    if not xs:
        raise ParameterError("component must be non-empty")
    return min(max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)


def remove_thin_obstacles(grid: OccupancyGrid, path_width: int) -> PreprocessResult:
    """Erase 8-connected obstacle components narrower than ``path_width``.

    A component is thin when the smaller side of its bounding box is
    strictly less than the path width, so ``path_width`` = 1 never
    removes anything.
    """
    if path_width < 1:
        raise ParameterError("path_width must be >= 1")
    labels = connected_components(grid.cells, connectivity=8)
    removed = np.zeros_like(grid.cells)
    removed_count = 0
    if labels.count:
        ys, xs = np.nonzero(labels.labels)
        labs = labels.labels[ys, xs]
        min_x = np.full(labels.count + 1, grid.width, dtype=np.int64)
        max_x = np.full(labels.count + 1, -1, dtype=np.int64)
        min_y = np.full(labels.count + 1, grid.height, dtype=np.int64)
        max_y = np.full(labels.count + 1, -1, dtype=np.int64)
        np.minimum.at(min_x, labs, xs)
        np.maximum.at(max_x, labs, xs)
        np.minimum.at(min_y, labs, ys)
        np.maximum.at(max_y, labs, ys)
        widths = np.minimum(max_x - min_x, max_y - min_y) + 1
        thin = np.zeros(labels.count + 1, dtype=bool)
        thin[1:] = widths[1:] < path_width
        removed_count = int(thin[1:].sum())
        removed = thin[labels.labels].astype(np.uint8)
    planning = grid.cells.copy()
    planning[removed == 1] = 0
    removed.flags.writeable = False
    return PreprocessResult(
        planning_grid=OccupancyGrid(planning),
        removed_mask=removed,
        removed_component_count=removed_count,
    )


def _legal_runs(path: Sequence[Coord], grid: OccupancyGrid) -> list[tuple[int, int, bool]]:
    """Maximal runs of (start, end, legal) raw-path indices."""
    runs = []
    i = 0
    n = len(path)
    while i < n:
        legal = grid.is_free(path[i].x, path[i].y)
        j = i
        while j + 1 < n and grid.is_free(path[j + 1].x, path[j + 1].y) == legal:
            j += 1
        runs.append((i, j, legal))
        i = j + 1
    return runs


def correct_path(raw_path: Sequence[Coord], original_grid: OccupancyGrid) -> CorrectionResult:
    """Replace raw-path spans that cross original obstacles with detours.

    Each maximal illegal run is bridged by a shortest path on the
    original grid between the legal coordinates surrounding it. When no
    bridge exists the following legal run is skipped entirely and the
    next reachable one is targeted instead; skipped spans are reported
    so the caller can drop their samples.
    """
    raw_path = [Coord(*c) for c in raw_path]
    index_map: list[int | None] = [None] * len(raw_path)
    corrected: list[Coord] = []
    replaced: list[ReplacedRun] = []
    skipped: list[tuple[int, int]] = []
    # Raw index span (illegal runs plus any skipped legal runs) waiting
    # to be bridged by a detour.
    pending: tuple[int, int] | None = None

    def emit(i: int) -> None:
        coord = raw_path[i]
        if corrected and corrected[-1] == coord:
            index_map[i] = len(corrected) - 1
        else:
            index_map[i] = len(corrected)
            corrected.append(coord)

    for start, end, legal in _legal_runs(raw_path, original_grid):
        if not legal:
            pending = (start if pending is None else pending[0], end)
            continue
        if pending is not None and not corrected:
            # Path began on erased obstacles; nothing to anchor a detour
            # from, so the prefix is dropped and the path starts here.
            skipped.append(pending)
            pending = None
        if pending is not None:
            anchor = corrected[-1]
            target = raw_path[start]
            dist, parent = distance_field(original_grid, anchor, connectivity=8)
            if not np.isfinite(dist[target.y, target.x]):
                # Unreachable: this legal run is skipped as well.
                skipped.append((start, end))
                pending = (pending[0], end)
                continue
            bridge = reconstruct_path(parent, anchor, target)
            for coord in bridge[1:-1]:
                corrected.append(coord)
            replaced.append(ReplacedRun(start=pending[0], end=pending[1],
                                        detour=tuple(bridge)))
            pending = None
        for i in range(start, end + 1):
            emit(i)

    if pending is not None:
        # Path ends inside a pending span: truncate and drop it.
        skipped.append(pending)

    return CorrectionResult(
        path=corrected,
        index_map=index_map,
        replaced_runs=tuple(replaced),
        skipped_spans=tuple(skipped),
    )
