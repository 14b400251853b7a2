"""Boustrophedon cellular decomposition.

Sweeps the grid left to right, one column at a time, tracking the
maximal free intervals of each column. A change in how intervals
connect between adjacent columns is an event:

* a split (one interval fans out into several) closes the covering cell
  and opens one new cell per outgoing interval;
* a merge (several intervals join into one) closes all incoming cells
  and opens a single new cell;
* an interval with no predecessor opens a fresh cell, one with no
  successor closes its cell.

Only a 1:1 overlap between consecutive columns continues a cell, so
every resulting cell is vertically convex: at each of its columns it
spans a single contiguous free run, bounded by the recorded ceiling
(top free row) and floor (bottom free row). Cells partition the
freespace exactly and can each be rastered without hitting obstacles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .grid import Coord, OccupancyGrid


@dataclass(frozen=True)
class FreeInterval:
    """Maximal free run [y_top, y_bottom] of one column."""

    column: int
    y_top: int
    y_bottom: int

    def overlaps(self, other: "FreeInterval") -> bool:
        return self.y_top <= other.y_bottom and other.y_top <= self.y_bottom


@dataclass
class Cell:
    """Obstacle-free region described by per-column ceiling/floor rows.

    ``ceiling[i]`` and ``floor[i]`` give the top and bottom free rows at
    column ``x_left + i``; every row in between is free in the source
    grid.
    """

    id: int
    x_left: int
    ceiling: list[int] = field(default_factory=list)
    floor: list[int] = field(default_factory=list)

    @property
    def x_right(self) -> int:
        return self.x_left + len(self.ceiling) - 1

    @property
    def width(self) -> int:
        return len(self.ceiling)

    def ceiling_at(self, x: int) -> int:
        return self.ceiling[x - self.x_left]

    def floor_at(self, x: int) -> int:
        return self.floor[x - self.x_left]

    def contains(self, x: int, y: int) -> bool:
        if not self.x_left <= x <= self.x_right:
            return False
        return self.ceiling_at(x) <= y <= self.floor_at(x)

    def area(self) -> int:
        return sum(f - c + 1 for c, f in zip(self.ceiling, self.floor))


@dataclass(frozen=True)
class CellSet:
    """Decomposition output: disjoint cells covering all free cells."""

    cells: tuple[Cell, ...]
    width: int
    height: int
    splits: int
    merges: int
    appearances: int
    disappearances: int

    def to_label_grid(self) -> np.ndarray:
        """Cell-id map (0 where obstacle); handy for partition checks."""
        out = np.zeros((self.height, self.width), dtype=np.int32)
        for cell in self.cells:
            for i, x in enumerate(range(cell.x_left, cell.x_right + 1)):
                out[cell.ceiling[i]:cell.floor[i] + 1, x] = cell.id
        return out


def slice_free_intervals(grid: OccupancyGrid, column: int) -> list[FreeInterval]:
    """Maximal free intervals of one column, top to bottom."""
    if not 0 <= column < grid.width:
        raise ParameterError(f"column {column} outside grid of width {grid.width}")
    col = grid.cells[:, column]
    out = []
    y = 0
    h = grid.height
    while y < h:
        if col[y] == 0:
            top = y
            while y + 1 < h and col[y + 1] == 0:
                y += 1
            out.append(FreeInterval(column=column, y_top=top, y_bottom=y))
        y += 1
    return out


def decompose(grid: OccupancyGrid) -> CellSet:
    """Partition the freespace of ``grid`` into boustrophedon cells.

    Cell ids are assigned in creation order during the sweep, starting
    at 1. A grid without free cells yields an empty cell set.
    """
    cells: list[Cell] = []
    open_cells: list[tuple[Cell, FreeInterval]] = []
    splits = merges = appearances = disappearances = 0

    def open_cell(interval: FreeInterval) -> None:
        cell = Cell(id=len(cells) + 1, x_left=interval.column,
                    ceiling=[interval.y_top], floor=[interval.y_bottom])
        cells.append(cell)
        next_open.append((cell, interval))

    for x in range(grid.width):
        curr = slice_free_intervals(grid, x)
        # Overlap sets between the previous column's open cells and the
        # current intervals (both sorted top to bottom and disjoint).
        prev_links: list[list[int]] = [[] for _ in open_cells]
        curr_links: list[list[int]] = [[] for _ in curr]
        pi = ci = 0
        while pi < len(open_cells) and ci < len(curr):
            p = open_cells[pi][1]
            c = curr[ci]
            if p.overlaps(c):
                prev_links[pi].append(ci)
                curr_links[ci].append(pi)
            if p.y_bottom < c.y_bottom:
                pi += 1
            else:
                ci += 1

        next_open: list[tuple[Cell, FreeInterval]] = []
        for ci, c in enumerate(curr):
            links = curr_links[ci]
            if len(links) == 1 and len(prev_links[links[0]]) == 1:
                cell = open_cells[links[0]][0]
                cell.ceiling.append(c.y_top)
                cell.floor.append(c.y_bottom)
                next_open.append((cell, c))
            else:
                open_cell(c)
                if not links:
                    appearances += 1
                elif len(links) > 1:
                    merges += 1
        for pi in range(len(open_cells)):
            if len(prev_links[pi]) > 1:
                splits += 1
            elif not prev_links[pi]:
                disappearances += 1
        open_cells = next_open

    return CellSet(
        cells=tuple(cells),
        width=grid.width,
        height=grid.height,
        splits=splits,
        merges=merges,
        appearances=appearances,
        disappearances=disappearances,
    )


def cell_corners(cell: Cell) -> tuple[Coord, Coord, Coord, Coord]:
    """The four raster entry corners, in TL, BL, TR, BR order.

    All four lie on free cells by construction; for single-column cells
    the left and right pairs coincide.
    """
    return (
        Coord(cell.x_left, cell.ceiling[0]),
        Coord(cell.x_left, cell.floor[0]),
        Coord(cell.x_right, cell.ceiling[-1]),
        Coord(cell.x_right, cell.floor[-1]),
    )
