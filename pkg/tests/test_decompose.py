import os

import numpy as np
import pytest

from covplan import Coord, OccupancyGrid, ParameterError, cell_corners, decompose, slice_free_intervals
from covplan.formats import cellset_to_text
from conftest import GOLDEN, grid_from_strings


class TestSliceFreeIntervals:
    def test_all_free_column(self):
        g = OccupancyGrid.empty(2, 5)
        out = slice_free_intervals(g, 0)
        assert [(i.y_top, i.y_bottom) for i in out] == [(0, 4)]

    def test_single_obstacle_splits(self):
        g = grid_from_strings(["0", "0", "1", "0", "0"])
        out = slice_free_intervals(g, 0)
        assert [(i.y_top, i.y_bottom) for i in out] == [(0, 1), (3, 4)]

    def test_three_freespace_regions_through_two_obstacles(self):
        # vertical slice crossing two obstacle bands counts three regions
        g = grid_from_strings(["0", "0", "1", "0", "1", "1", "0", "0"])
        out = slice_free_intervals(g, 0)
        assert len(out) == 3
        assert [(i.y_top, i.y_bottom) for i in out] == [(0, 1), (3, 3), (6, 7)]

    def test_column_out_of_range(self):
        with pytest.raises(ParameterError):
            slice_free_intervals(OccupancyGrid.empty(3, 3), 3)


def full_cover_count(cellset, grid):
    cover = np.zeros((grid.height, grid.width), dtype=int)
    for c in cellset.cells:
        for i, x in enumerate(range(c.x_left, c.x_right + 1)):
            cover[c.ceiling[i]:c.floor[i] + 1, x] += 1
    return cover


class TestDecompose:
    def test_obstacle_free_grid_is_one_cell(self):
        cs = decompose(OccupancyGrid.empty(8, 6))
        assert len(cs.cells) == 1
        cell = cs.cells[0]
        assert cell.x_left == 0 and cell.x_right == 7
        assert cell.ceiling == [0] * 8 and cell.floor == [5] * 8

    def test_all_obstacle_grid_is_empty(self):
        cs = decompose(OccupancyGrid(np.ones((3, 3), dtype=np.uint8)))
        assert cs.cells == ()

    def test_centered_rectangle_gives_four_cells(self):
        cells = np.zeros((10, 10), dtype=np.uint8)
        cells[3:7, 3:7] = 1
        cs = decompose(OccupancyGrid(cells))
        assert len(cs.cells) == 4
        assert cs.splits == 1 and cs.merges == 1

    def test_centered_rectangle_golden_dump(self):
        cells = np.zeros((10, 10), dtype=np.uint8)
        cells[3:7, 3:7] = 1
        cs = decompose(OccupancyGrid(cells))
        with open(os.path.join(GOLDEN, "rect_obstacle_cells.txt")) as f:
            assert cellset_to_text(cs) == f.read()

    def test_ids_are_creation_ordered(self):
        cells = np.zeros((10, 10), dtype=np.uint8)
        cells[3:7, 3:7] = 1
        cs = decompose(OccupancyGrid(cells))
        assert [c.id for c in cs.cells] == [1, 2, 3, 4]

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        cells = (rng.random((15, 15)) < 0.3).astype(np.uint8)
        a = decompose(OccupancyGrid(cells))
        b = decompose(OccupancyGrid(cells))
        assert cellset_to_text(a) == cellset_to_text(b)

    @pytest.mark.parametrize("density", [0.1, 0.3, 0.5])
    def test_partition_on_random_maps(self, density):
        rng = np.random.default_rng(int(density * 100))
        for _ in range(70):
            grid = OccupancyGrid((rng.random((20, 20)) < density).astype(np.uint8))
            cs = decompose(grid)
            cover = full_cover_count(cs, grid)
            assert (cover[grid.cells == 0] == 1).all(), "free cell missed or doubled"
            assert (cover[grid.cells == 1] == 0).all(), "cell overlaps an obstacle"

    def test_vertical_convexity_of_every_cell(self):
        rng = np.random.default_rng(77)
        for _ in range(30):
            grid = OccupancyGrid((rng.random((18, 18)) < 0.35).astype(np.uint8))
            for cell in decompose(grid).cells:
                for i, x in enumerate(range(cell.x_left, cell.x_right + 1)):
                    top, bottom = cell.ceiling[i], cell.floor[i]
                    assert top <= bottom
                    assert (grid.cells[top:bottom + 1, x] == 0).all()
                    if top > 0:
                        assert grid.cells[top - 1, x] == 1
                    if bottom < grid.height - 1:
                        assert grid.cells[bottom + 1, x] == 1

    def test_event_counts_reconcile_with_interval_deltas(self):
        rng = np.random.default_rng(41)
        for _ in range(40):
            grid = OccupancyGrid((rng.random((16, 16)) < 0.3).astype(np.uint8))
            cs = decompose(grid)
            # recompute expected net from independent interval adjacency
            intervals = [slice_free_intervals(grid, x) for x in range(grid.width)]
            splits = merges = appear = disappear = 0
            prev = []
            for curr in intervals:
                links_p = [0] * len(prev)
                links_c = [0] * len(curr)
                for pi, p in enumerate(prev):
                    for ci, c in enumerate(curr):
                        if p.y_top <= c.y_bottom and c.y_top <= p.y_bottom:
                            links_p[pi] += 1
                            links_c[ci] += 1
                splits += sum(1 for n in links_p if n > 1)
                merges += sum(1 for n in links_c if n > 1)
                appear += sum(1 for n in links_c if n == 0)
                disappear += sum(1 for n in links_p if n == 0)
                prev = curr
            assert (cs.splits, cs.merges, cs.appearances, cs.disappearances) == \
                (splits, merges, appear, disappear)


class TestCellCorners:
    def test_single_column_cell(self):
        g = grid_from_strings(["0", "0", "0"])
        cell = decompose(g).cells[0]
        tl, bl, tr, br = cell_corners(cell)
        assert tl == Coord(0, 0) and bl == Coord(0, 2)
        assert tr == tl and br == bl

    def test_rectangular_cell(self):
        cells = np.ones((10, 10), dtype=np.uint8)
        cells[3:8, 2:6] = 0
        cell = decompose(OccupancyGrid(cells)).cells[0]
        assert cell_corners(cell) == (Coord(2, 3), Coord(2, 7), Coord(5, 3), Coord(5, 7))

    def test_staircase_ceiling(self):
        g = grid_from_strings([
            "11000",
            "10000",
            "00000",
            "00000",
        ])
        cs = decompose(g)
        cell = max(cs.cells, key=lambda c: c.area())
        tl, bl, tr, br = cell_corners(cell)
        assert tl == Coord(cell.x_left, cell.ceiling[0])
        assert br == Coord(cell.x_right, cell.floor[-1])
        for corner in (tl, bl, tr, br):
            assert g.is_free(corner.x, corner.y)
