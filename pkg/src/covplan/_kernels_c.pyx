# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_kernels_py``.

Must stay bit-identical to the pure-Python kernels: same neighbor order
(N, E, S, W, NE, SE, SW, NW), same (distance, flat index) settle order,
same strict-improvement relaxation. ``tests/test_kernels.py`` enforces
exact equality between the two implementations.
"""

from libc.math cimport sqrt

import numpy as np

IMPLEMENTATION = "cython"

cdef int[8] _DX
cdef int[8] _DY
_DX[0] = 0;  _DY[0] = -1   # N
_DX[1] = 1;  _DY[1] = 0    # E
_DX[2] = 0;  _DY[2] = 1    # S
_DX[3] = -1; _DY[3] = 0    # W
_DX[4] = 1;  _DY[4] = -1   # NE
_DX[5] = 1;  _DY[5] = 1    # SE
_DX[6] = -1; _DY[6] = 1    # SW
_DX[7] = -1; _DY[7] = -1   # NW


def label_components(mask, int connectivity):
    """Label connected components of a binary mask (see _kernels_py)."""
    cdef const unsigned char[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef int h = m.shape[0]
    cdef int w = m.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] labels = labels_arr
    queue_arr = np.empty(h * w, dtype=np.int32)
    cdef int[::1] queue = queue_arr
    cdef int noffs = 4 if connectivity == 4 else 8
    cdef int count = 0
    cdef int head, tail, x0, y0, x, y, nx, ny, k, u
    for y0 in range(h):
        for x0 in range(w):
            if m[y0, x0] == 0 or labels[y0, x0] != 0:
                continue
            count += 1
            labels[y0, x0] = count
            head = 0
            tail = 0
            queue[tail] = y0 * w + x0
            tail += 1
            while head < tail:
                u = queue[head]
                head += 1
                x = u % w
                y = u / w
                for k in range(noffs):
                    nx = x + _DX[k]
                    ny = y + _DY[k]
                    if 0 <= nx < w and 0 <= ny < h \
                            and m[ny, nx] != 0 and labels[ny, nx] == 0:
                        labels[ny, nx] = count
                        queue[tail] = ny * w + nx
                        tail += 1
    return labels_arr, count


cdef inline bint _heap_less(double da, int ia, double db, int ib) noexcept:
    return da < db or (da == db and ia < ib)


def dijkstra_grid(obstacles, int sx, int sy, int connectivity):
    """Single-source grid shortest paths (see _kernels_py)."""
    cdef const unsigned char[:, ::1] obs = np.ascontiguousarray(obstacles, dtype=np.uint8)
    cdef int h = obs.shape[0]
    cdef int w = obs.shape[1]
    cdef int n = h * w
    dist_arr = np.full(n, np.inf)
    parent_arr = np.full(n, -1, dtype=np.int32)
    cdef double[::1] dist = dist_arr
    cdef int[::1] parent = parent_arr
    cdef int src = sy * w + sx
    if obs[sy, sx] != 0:
        return dist_arr.reshape(h, w), parent_arr.reshape(h, w)

    done_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] done = done_arr
    # Worst case one push per directed edge plus the source.
    heap_d_arr = np.empty(8 * n + 8)
    heap_i_arr = np.empty(8 * n + 8, dtype=np.int32)
    cdef double[::1] heap_d = heap_d_arr
    cdef int[::1] heap_i = heap_i_arr
    cdef int heap_n = 0

    cdef int noffs = 4 if connectivity == 4 else 8
    cdef double sqrt2 = sqrt(2.0)
    cdef double d, nd, cd
    cdef int u, ux, uy, nx, ny, v, k, i, child, ci

    dist[src] = 0.0
    heap_d[0] = 0.0
    heap_i[0] = src
    heap_n = 1

    while heap_n > 0:
        # Pop the (distance, index) minimum.
        d = heap_d[0]
        u = heap_i[0]
        heap_n -= 1
        cd = heap_d[heap_n]
        ci = heap_i[heap_n]
        i = 0
        while True:
            child = 2 * i + 1
            if child >= heap_n:
                break
            if child + 1 < heap_n and _heap_less(
                    heap_d[child + 1], heap_i[child + 1],
                    heap_d[child], heap_i[child]):
                child += 1
            if _heap_less(heap_d[child], heap_i[child], cd, ci):
                heap_d[i] = heap_d[child]
                heap_i[i] = heap_i[child]
                i = child
            else:
                break
        if heap_n > 0:
            heap_d[i] = cd
            heap_i[i] = ci

        if done[u] != 0:
            continue
        done[u] = 1
        ux = u % w
        uy = u / w
        for k in range(noffs):
            nx = ux + _DX[k]
            ny = uy + _DY[k]
            if not (0 <= nx < w and 0 <= ny < h):
                continue
            v = ny * w + nx
            if obs[ny, nx] != 0:
                continue
            nd = d + (sqrt2 if k >= 4 else 1.0)
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                # Sift up.
                i = heap_n
                heap_n += 1
                while i > 0 and _heap_less(nd, v, heap_d[(i - 1) // 2], heap_i[(i - 1) // 2]):
                    heap_d[i] = heap_d[(i - 1) // 2]
                    heap_i[i] = heap_i[(i - 1) // 2]
                    i = (i - 1) // 2
                heap_d[i] = nd
                heap_i[i] = v
    return dist_arr.reshape(h, w), parent_arr.reshape(h, w)
