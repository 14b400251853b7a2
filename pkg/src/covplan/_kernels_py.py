"""Pure-Python fallback for the hot grid kernels.

This module is the reference implementation: the compiled twin in
``_kernels_c.pyx`` must return bit-identical results (same labels, same
distances, same parents). Both relax neighbors in the fixed order
N, E, S, W, NE, SE, SW, NW and settle Dijkstra nodes by the total order
(distance, flat index), which pins the float arithmetic order and hence
the exact IEEE results.
"""

from __future__ import annotations

import heapq
import math
from collections import deque

import numpy as np

IMPLEMENTATION = "python"

# (dx, dy) per direction: N, E, S, W, NE, SE, SW, NW.
_OFFSETS = ((0, -1), (1, 0), (0, 1), (-1, 0), (1, -1), (1, 1), (-1, 1), (-1, -1))
_SQRT2 = math.sqrt(2.0)


def label_components(mask, connectivity):
    """Label connected components of a binary mask.

    Labels are dense from 1 in row-major order of each component's first
    pixel; 0 is background. Returns (labels int32 array, count).
    """
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    noffs = 4 if connectivity == 4 else 8
    count = 0
    for y0 in range(h):
        for x0 in range(w):
            if mask[y0, x0] == 0 or labels[y0, x0] != 0:
                continue
            count += 1
            labels[y0, x0] = count
            queue = deque(((x0, y0),))
            while queue:
                x, y = queue.popleft()
                for dx, dy in _OFFSETS[:noffs]:
                    nx, ny = x + dx, y + dy
                    if 0 <= nx < w and 0 <= ny < h \
                            and mask[ny, nx] != 0 and labels[ny, nx] == 0:
                        labels[ny, nx] = count
                        queue.append((nx, ny))
    return labels, count


def dijkstra_grid(obstacles, sx, sy, connectivity):
    """Single-source shortest paths over the free cells of a grid.

    Moves cost 1 between cardinal neighbors and sqrt(2) between diagonal
    neighbors (8-connectivity only). Returns (dist, parent): dist is a
    float64 grid holding +inf where unreachable, parent holds the flat
    predecessor index (-1 for the source and unreachable cells).
    """
    obstacles = np.ascontiguousarray(obstacles, dtype=np.uint8)
    h, w = obstacles.shape
    n = h * w
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int32)
    flat = obstacles.ravel()
    src = sy * w + sx
    if flat[src] != 0:
        return dist.reshape(h, w), parent.reshape(h, w)
    noffs = 4 if connectivity == 4 else 8
    done = np.zeros(n, dtype=bool)
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        ux = u % w
        uy = u // w
        for k in range(noffs):
            dx, dy = _OFFSETS[k]
            nx, ny = ux + dx, uy + dy
            if not (0 <= nx < w and 0 <= ny < h):
                continue
            v = ny * w + nx
            if flat[v] != 0:
                continue
            nd = d + (_SQRT2 if k >= 4 else 1.0)
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist.reshape(h, w), parent.reshape(h, w)
