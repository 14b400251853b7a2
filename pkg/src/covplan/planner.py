"""Serpentine (lawnmower) rastering and full coverage-plan assembly.

A plan rasters every reachable decomposition cell: full vertical strokes
bounded by the cell's ceiling and floor, shifted sideways by the sample
spacing, chained together greedily by shortest obstacle-aware routes to
the nearest corner of the next cell. Samples are taken every
``sample_spacing`` path steps inside cells (never on travel legs
between cells), starting with the cell entry point.

Between strokes the robot shifts along the boundary it last touched.
When an intermediate column is so jagged that its free run would escape
the reach of the surrounding strokes and the boundary walk, a full
extra stroke is inserted across that column; this keeps every free cell
within Chebyshev ``sample_spacing`` of the path, which the plain
serpentine pattern alone does not guarantee on staircase-shaped cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .decompose import Cell, CellSet, cell_corners, decompose
from .envgen import EnvironmentBundle
from .errors import EmptyPlanError, ParameterError
from .grid import (
    Coord,
    OccupancyGrid,
    connected_components,
    distance_field,
    path_cost,
    reconstruct_path,
)
from .preprocess import remove_thin_obstacles, correct_path


@dataclass(frozen=True)
class PlanConfig:
    """Planner knobs: spacing (grid cells), start coordinate, preprocessing."""

    sample_spacing: int
    start: Coord | None = None
    preprocess: bool = False

    def __post_init__(self) -> None:
        if self.sample_spacing < 1:
            raise ParameterError("sample_spacing must be >= 1")


@dataclass(frozen=True)
class PlanSegment:
    """Raster segment of one cell: inclusive index range into the path."""

    cell_id: int
    start: int
    end: int


@dataclass(frozen=True)
class PreprocessReport:
    """What thin-obstacle preprocessing did to this plan."""

    removed_components: int
    removed_area: int
    skip_events: int
    dropped_samples: int


@dataclass(frozen=True)
class Plan:
    """Executed path, ordered sample coordinates, and bookkeeping."""

    path: tuple[Coord, ...]
    samples: tuple[Coord, ...]
    segments: tuple[PlanSegment, ...]
    cell_order: tuple[int, ...]
    sample_spacing: int
    preprocess: PreprocessReport | None = None

    @property
    def sample_count(self) -> int:
        return len(self.samples)


def path_length(plan: Plan) -> float:
    """Total executed path length (1 per cardinal step, sqrt(2) diagonal)."""
    return path_cost(plan.path)


def _covers(target_lo: int, target_hi: int, bands: list[tuple[int, int]]) -> bool:
    """True when the union of ``bands`` covers [target_lo, target_hi]."""
    y = target_lo
    for lo, hi in sorted(bands):
        if lo > y:
            return False
        y = max(y, hi + 1)
        if y > target_hi:
            return True
    return y > target_hi


def _raster_cell_indexed(cell: Cell, entry: Coord, spacing: int):
    """Raster one cell; returns (segment, sample indices, exit coord)."""
    if spacing < 1:
        raise ParameterError("spacing must be >= 1")
    entry = Coord(*entry)
    if entry not in cell_corners(cell):
        raise ParameterError(f"{entry} is not a corner of cell {cell.id}")

    seg = [entry]
    sample_idx = [0]
    steps = 0

    def take(coord: Coord) -> None:
        nonlocal steps
        seg.append(coord)
        steps += 1
        if steps % spacing == 0:
            sample_idx.append(steps)

    h_dir = 1 if entry.x == cell.x_left else -1
    end_col = cell.x_right if h_dir == 1 else cell.x_left
    c = entry.x
    y = entry.y
    on_top = y == cell.ceiling_at(c)
    # Column of the last full stroke, used by the coverage check below.
    left_stroke = c

    while True:
        target = cell.floor_at(c) if on_top else cell.ceiling_at(c)
        step = 1 if target > y else -1
        while y != target:
            y += step
            take(Coord(c, y))
        on_top = not on_top
        if c == end_col:
            break
        left_stroke = c
        if h_dir == 1:
            c_next = min(c + spacing, cell.x_right)
        else:
            c_next = max(c - spacing, cell.x_left)

        m = c
        while m != c_next:
            m_next = m + h_dir
            b_next = cell.ceiling_at(m_next) if on_top else cell.floor_at(m_next)
            if (b_next < y) if not on_top else (b_next > y):
                # Boundary retreats: adjust vertically before crossing.
                v = 1 if b_next > y else -1
                while y != b_next:
                    y += v
                    take(Coord(m, y))
                take(Coord(m_next, y))
            else:
                take(Coord(m_next, y))
                v = 1 if b_next > y else -1
                while y != b_next:
                    y += v
                    take(Coord(m_next, y))
            m = m_next
            if m == c_next:
                break
            # Would the surrounding strokes and this walk leave part of
            # column m out of sampling reach? If so, stroke it fully.
            bands = [
                (cell.ceiling_at(left_stroke) - spacing, cell.floor_at(left_stroke) + spacing),
                (cell.ceiling_at(c_next) - spacing, cell.floor_at(c_next) + spacing),
                (y - spacing, y + spacing),
            ]
            if not _covers(cell.ceiling_at(m), cell.floor_at(m), bands):
                target = cell.floor_at(m) if on_top else cell.ceiling_at(m)
                v = 1 if target > y else -1
                while y != target:
                    y += v
                    take(Coord(m, y))
                on_top = not on_top
                left_stroke = m
        c = c_next

    return seg, sample_idx, seg[-1]


def raster_cell(cell: Cell, entry: Coord, spacing: int):
    """Raster one cell from an entry corner.

    Returns (path segment, sample coordinates, exit coordinate). The
    segment starts at the entry corner, which is always sampled.
    """
    seg, sample_idx, exit_coord = _raster_cell_indexed(cell, entry, spacing)
    return seg, [seg[i] for i in sample_idx], exit_coord


def _route_to_nearest_cell(position: Coord, unrastered: dict[int, Cell],
                           grid: OccupancyGrid,
                           corner_cache: dict[int, tuple[Coord, ...]] | None = None):
    """Cheapest (cell, corner) from ``position`` plus the route to it.

    Candidates are ordered by (cell id, corner rank) so that equal costs
    resolve to the lowest id and then TL, BL, TR, BR.
    """
    if not unrastered:
        return None
    if corner_cache is None:
        corner_cache = {cid: cell_corners(c) for cid, c in unrastered.items()}
    dist, parent = distance_field(grid, position, connectivity=8)
    ids = sorted(unrastered)
    xs = np.fromiter((c.x for cid in ids for c in corner_cache[cid]),
                     dtype=np.intp, count=4 * len(ids))
    ys = np.fromiter((c.y for cid in ids for c in corner_cache[cid]),
                     dtype=np.intp, count=4 * len(ids))
    costs = dist[ys, xs]
    k = int(np.argmin(costs))
    if not np.isfinite(costs[k]):
        return None
    cell = unrastered[ids[k // 4]]
    corner = corner_cache[cell.id][k % 4]
    return cell, corner, reconstruct_path(parent, position, corner)


def next_cell(position: Coord, unrastered: CellSet | Iterable[Cell],
              grid: OccupancyGrid):
    """Greedy choice of the next cell to raster.

    Picks the (cell, corner) pair with the smallest obstacle-aware
    shortest-path cost from ``position``; ties prefer the lowest cell id
    and then TL, BL, TR, BR corner order. Returns None when nothing is
    reachable.
    """
    cells = unrastered.cells if isinstance(unrastered, CellSet) else unrastered
    route = _route_to_nearest_cell(Coord(*position), {c.id: c for c in cells}, grid)
    if route is None:
        return None
    return route[0], route[1]


def _auto_start(grid: OccupancyGrid) -> Coord:
    """First scan-order free cell of the largest freespace component.

    Starting inside a small enclosed pocket would make the rest of the
    map unreachable, so the start anchors to the dominant component
    (ties break toward the component appearing first in scan order).
    """
    free = (grid.cells == 0).astype(np.uint8)
    labels = connected_components(free, connectivity=8)
    sizes = np.bincount(labels.labels.ravel(), minlength=labels.count + 1)
    sizes[0] = 0
    target = int(np.argmax(sizes))
    ys, xs = np.nonzero(labels.labels == target)
    return Coord(int(xs[0]), int(ys[0]))


def _dedupe(coords: Iterable[Coord]) -> list[Coord]:
    seen = set()
    out = []
    for c in coords:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def plan(env: EnvironmentBundle, config: PlanConfig) -> Plan:
    """Build the full coverage plan for one environment.

    Decomposes the (optionally preprocessed) obstacle grid, rasters
    every reachable cell, and chains cells with shortest travel legs on
    which no samples are taken. With preprocessing enabled the raw path
    is corrected against the original grid afterwards: detours around
    erased obstacles are spliced in and samples scheduled on erased
    cells are relocated onto their detour (or dropped when a span was
    skipped).
    """
    original = env.obstacle_map
    if original.free_count() == 0:
        raise EmptyPlanError("environment has no free cells")

    pre = None
    planning_grid = original
    if config.preprocess:
        pre = remove_thin_obstacles(original, config.sample_spacing)
        planning_grid = pre.planning_grid

    if config.start is None:
        start = _auto_start(original)
    else:
        start = Coord(*config.start)
        if not original.in_bounds(start.x, start.y) or not original.is_free(start.x, start.y):
            raise ParameterError(f"start {start} is not a free cell")

    cellset = decompose(planning_grid)
    corners = [cell_corners(cell) for cell in cellset.cells]
    # Flat candidate arrays in (cell id, corner rank) order; np.argmin's
    # first-minimum rule then reproduces the documented tie-breaking.
    corner_xs = np.array([c.x for four in corners for c in four], dtype=np.intp)
    corner_ys = np.array([c.y for four in corners for c in four], dtype=np.intp)
    alive = np.ones(len(corner_xs), dtype=bool)

    path: list[Coord] = [start]
    raw_samples: list[tuple[int, Coord]] = []
    segments: list[PlanSegment] = []
    cell_order: list[int] = []
    current = start

    while alive.any():
        dist, parent = distance_field(planning_grid, current, connectivity=8)
        costs = dist[corner_ys, corner_xs]
        costs[~alive] = np.inf
        k = int(np.argmin(costs))
        if not np.isfinite(costs[k]):
            break
        cell = cellset.cells[k // 4]
        corner = corners[k // 4][k % 4]
        leg = reconstruct_path(parent, current, corner)
        path.extend(leg[1:])
        seg_start = len(path) - 1
        seg, sample_idx, exit_coord = _raster_cell_indexed(cell, corner, config.sample_spacing)
        path.extend(seg[1:])
        raw_samples.extend((seg_start + i, seg[i]) for i in sample_idx)
        segments.append(PlanSegment(cell_id=cell.id, start=seg_start, end=len(path) - 1))
        cell_order.append(cell.id)
        alive[(k // 4) * 4:(k // 4) * 4 + 4] = False
        current = exit_coord

    if not config.preprocess:
        return Plan(
            path=tuple(path),
            samples=tuple(_dedupe(coord for _, coord in raw_samples)),
            segments=tuple(segments),
            cell_order=tuple(cell_order),
            sample_spacing=config.sample_spacing,
        )

    corr = correct_path(path, original)
    kept: list[Coord] = []
    dropped = 0
    for idx, coord in raw_samples:
        if corr.index_map[idx] is not None:
            kept.append(coord)
            continue
        if original.is_free(coord.x, coord.y):
            dropped += 1  # legal coordinate inside a skipped span
            continue
        run = next((r for r in corr.replaced_runs if r.start <= idx <= r.end), None)
        if run is None:
            dropped += 1
            continue
        # Relocate onto the nearest detour coordinate (ties: earliest).
        kept.append(min(
            enumerate(run.detour),
            key=lambda t: ((t[1].x - coord.x) ** 2 + (t[1].y - coord.y) ** 2, t[0]),
        )[1])

    remapped: list[PlanSegment] = []
    for s in segments:
        mapped = [corr.index_map[i] for i in range(s.start, s.end + 1)
                  if corr.index_map[i] is not None]
        if mapped:
            remapped.append(PlanSegment(cell_id=s.cell_id, start=min(mapped), end=max(mapped)))

    report = PreprocessReport(
        removed_components=pre.removed_component_count,
        removed_area=pre.removed_area,
        skip_events=corr.skip_events,
        dropped_samples=dropped,
    )
    return Plan(
        path=tuple(corr.path),
        samples=tuple(_dedupe(kept)),
        segments=tuple(remapped),
        cell_order=tuple(cell_order),
        sample_spacing=config.sample_spacing,
        preprocess=report,
    )
