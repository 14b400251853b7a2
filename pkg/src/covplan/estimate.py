"""Distribution reconstruction from sampled values.

Samples are triangulated (Delaunay, for a reproducible mesh) and the
field is interpolated linearly inside each triangle via barycentric
weights. Grid points outside the convex hull of the samples, or all
points when a triangulation is not available (fewer than three samples
or collinear samples), take the value of the nearest sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .errors import ParameterError
from .grid import Coord, ScalarField

METHOD_LINEAR = 0
METHOD_NEAREST = 1
METHOD_FALLBACK = 2


@dataclass(frozen=True)
class SampleSet:
    """Distinct sample coordinates with their measured values."""

    coords: tuple[Coord, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.coords) != len(self.values):
            raise ParameterError("coords and values must have equal length")
        if len(set(self.coords)) != len(self.coords):
            raise ParameterError("sample coordinates must be distinct")
        if len(self.values) and not np.isfinite(self.values).all():
            raise ParameterError("sample values must be finite")

    @classmethod
    def from_field(cls, coords: Sequence[Coord], field: ScalarField) -> "SampleSet":
        """Read exact measurements for ``coords`` off a true field."""
        coords = tuple(Coord(*c) for c in coords)
        values = np.array([field.values[c.y, c.x] for c in coords], dtype=np.float64)
        return cls(coords=coords, values=values)

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Triangulation:
    """Delaunay mesh over sample points.

    ``triangles`` holds vertex index triples into the original point
    order, each triple sorted ascending and the list sorted
    lexicographically, so the mesh is a canonical function of the point
    set. The raw scipy object is kept for fast point location.
    """

    points: np.ndarray
    triangles: tuple[tuple[int, int, int], ...]
    _qhull: Delaunay
    _order: np.ndarray


def triangulate(coords: Sequence[Coord]) -> Triangulation | None:
    """Delaunay-triangulate the points, or None when degenerate.

    Points are sorted lexicographically before triangulation so that
    co-circular tie-breaking does not depend on sample order. Returns
    None for fewer than 3 points or collinear points; callers fall back
    to nearest-sample estimation.
    """
    pts = np.asarray([(c[0], c[1]) for c in coords], dtype=np.float64)
    if len(pts) < 3:
        return None
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    try:
        qhull = Delaunay(pts[order])
    except QhullError:
        return None
    if qhull.simplices.size == 0:
        return None
    tris = sorted(tuple(sorted(int(order[i]) for i in simplex))
                  for simplex in qhull.simplices)
    return Triangulation(points=pts, triangles=tuple(tris),
                         _qhull=qhull, _order=order)


@dataclass(frozen=True)
class EstimatedField:
    """Reconstructed field plus the method used at each location."""

    field: ScalarField
    method: np.ndarray


def _nearest_values(samples: SampleSet, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Nearest-sample value at each query point; ties to the sample
    earliest in row-major scan order."""
    coords = np.asarray(samples.coords, dtype=np.int64)
    scan = np.lexsort((coords[:, 0], coords[:, 1]))
    sx = coords[scan, 0]
    sy = coords[scan, 1]
    sv = samples.values[scan]
    d2 = (xs[:, None] - sx[None, :]) ** 2 + (ys[:, None] - sy[None, :]) ** 2
    return sv[np.argmin(d2, axis=1)]


def interpolate(samples: SampleSet, dims: tuple[int, int]) -> EstimatedField:
    """Estimate the field on a (width, height) grid from samples.

    Inside the convex hull of the samples: barycentric linear
    interpolation on the Delaunay mesh. Outside the hull, or when no
    triangulation exists: nearest sample. Estimates at the sample
    coordinates themselves are exact by construction.
    """
    if len(samples) == 0:
        raise ParameterError("cannot interpolate an empty sample set")
    width, height = dims
    if width <= 0 or height <= 0:
        raise ParameterError("field dimensions must be positive")

    gy, gx = np.mgrid[0:height, 0:width]
    xs = gx.ravel().astype(np.float64)
    ys = gy.ravel().astype(np.float64)
    est = np.empty(width * height, dtype=np.float64)
    method = np.empty(width * height, dtype=np.uint8)

    tri = triangulate(samples.coords)
    if tri is None:
        est[:] = _nearest_values(samples, xs, ys)
        method[:] = METHOD_FALLBACK
    else:
        qhull = tri._qhull
        pts = np.column_stack([xs, ys])
        simplex = qhull.find_simplex(pts)
        inside = simplex >= 0
        method[:] = METHOD_NEAREST
        method[inside] = METHOD_LINEAR
        if inside.any():
            sidx = simplex[inside]
            transform = qhull.transform[sidx]
            delta = pts[inside] - transform[:, 2, :]
            bary2 = np.einsum("nij,nj->ni", transform[:, :2, :], delta)
            bary = np.column_stack([bary2, 1.0 - bary2.sum(axis=1)])
            vertex_vals = samples.values[tri._order][qhull.simplices[sidx]]
            est[inside] = (bary * vertex_vals).sum(axis=1)
        if not inside.all():
            est[~inside] = _nearest_values(samples, xs[~inside], ys[~inside])

    est = est.reshape(height, width)
    method = method.reshape(height, width)
    # Exactness at sample coordinates, independent of rounding inside
    # the barycentric evaluation.
    for c, v in zip(samples.coords, samples.values):
        est[c.y, c.x] = v
    method.flags.writeable = False
    return EstimatedField(field=ScalarField(est), method=method)
