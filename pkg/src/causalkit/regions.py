"""Region algebra on the spatial grid.

A region is a per-cell signed field, positive inside.  Primitive shapes
(ball, box, annulus and unions of those) rasterise to exact Euclidean
signed distance on the torus; derived regions (optical balls, warped or
thresholded sets) carry whatever Lipschitz field produced them, and can be
normalised back to Euclidean units with :func:`redistance`.

Set predicates carry an explicit margin in cells: strict inclusions of the
underlying continuum sets become margin-strict inclusions of the rasters.
``contains(A, B, m)`` tests that every cell of B deeper than ``m * dx``
(measured in B's own field units) lies in the interior of A.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import ndimage

from . import eikonal, geometry
from .errors import DegenerateBallError, EmptyRegionError, GridMismatchError
from .grid import SpatialGrid


@dataclass(frozen=True)
class Margin:
    """Containment tolerance in multiples of the cell size."""

    cells: float = 0.0

    def __post_init__(self):
        if self.cells < 0:
            raise ValueError("margin must be nonnegative")


def _cells(m) -> float:
    return m.cells if isinstance(m, Margin) else float(m)


@dataclass(frozen=True, eq=False)
class Region:
    """Subset of the grid carried as a signed field (positive inside)."""

    grid: SpatialGrid
    sdf: np.ndarray
    units: str = "euclidean"

    def __post_init__(self):
        if self.sdf.shape != self.grid.shape:
            raise GridMismatchError("sdf shape does not match grid")

    # -- basic predicates ---------------------------------------------------

    def interior_nonempty(self, margin_cells: float = 0.0) -> bool:
        return bool(np.max(self.sdf) > margin_cells * self.grid.spacing)

    def exterior_nonempty(self, margin_cells: float = 0.0) -> bool:
        return bool(np.min(self.sdf) < -margin_cells * self.grid.spacing)

    def inside(self) -> np.ndarray:
        return self.sdf > 0

    def area(self) -> float:
        """Cell-count measure of the interior."""
        return float(np.count_nonzero(self.sdf > 0)) * self.grid.spacing**self.grid.dim

    def complement(self) -> "Region":
        return Region(self.grid, -self.sdf, self.units)

    def sample(self, pts) -> np.ndarray:
        """Periodic multilinear interpolation of the field at points."""
        return self.grid.sample_field(self.sdf, pts)


# ---------------------------------------------------------------------------
# primitive shapes (exact Euclidean sdf on the torus)
# ---------------------------------------------------------------------------


def ball(grid: SpatialGrid, center, radius: float) -> Region:
    c = np.asarray(center, dtype=float)
    d = grid.torus_distance(grid.points(), c)
    return Region(grid, radius - d)


def box(grid: SpatialGrid, lo, hi) -> Region:
    """Axis box given by corners; exact sdf outside, slab-distance inside."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    c = (lo + hi) / 2.0
    half = (hi - lo) / 2.0
    q = np.abs(grid.wrap(grid.points() - c)) - half
    outside = np.sqrt(np.sum(np.maximum(q, 0.0) ** 2, axis=-1))
    inside = np.minimum(np.max(q, axis=-1), 0.0)
    return Region(grid, -(outside + inside))


def annulus(grid: SpatialGrid, center, r_inner: float, r_outer: float) -> Region:
    c = np.asarray(center, dtype=float)
    d = grid.torus_distance(grid.points(), c)
    return Region(grid, np.minimum(r_outer - d, d - r_inner))


def union_of(regions: Iterable[Region]) -> Region:
    regions = list(regions)
    grid = regions[0].grid
    for r in regions[1:]:
        if r.grid != grid:
            raise GridMismatchError("union over different grids")
    sdf = regions[0].sdf
    for r in regions[1:]:
        sdf = np.maximum(sdf, r.sdf)
    return Region(grid, sdf)


# ---------------------------------------------------------------------------
# predicates and metrology
# ---------------------------------------------------------------------------


def containment_margin(A: Region, B: Region) -> float:
    """Containment slack of B inside A, in cells of B's field.

    Positive: B's interior sits strictly inside A.  ``contains(A, B, m)`` is
    exactly ``containment_margin(A, B) >= -m``.  +inf when A covers the grid.
    """
    if A.grid != B.grid:
        raise GridMismatchError("regions on different grids")
    outside_A = A.sdf <= 0
    if not np.any(outside_A):
        return float("inf")
    worst = float(np.max(B.sdf[outside_A]))
    return -worst / B.grid.spacing


def contains(A: Region, B: Region, m=Margin(0.0)) -> bool:
    """B inside A, allowing B's shell of ``m`` cells to stick out."""
    return containment_margin(A, B) >= -_cells(m)


def boundary_points(R: Region) -> np.ndarray:
    """Sub-cell interface vertices (edge crossings of the zero level), (N, dim)."""
    pts = R.grid.points()
    h = R.grid.spacing
    out = []
    pos = R.sdf > 0
    for axis in range(R.grid.dim):
        nb = np.roll(R.sdf, -1, axis=axis)
        nb_pos = np.roll(pos, -1, axis=axis)
        cross = pos != nb_pos
        if not np.any(cross):
            continue
        denom = R.sdf - nb
        with np.errstate(divide="ignore", invalid="ignore"):
            theta = np.where(denom != 0, R.sdf / denom, 0.5)
        theta = np.clip(theta, 0.0, 1.0)
        v = pts[cross].copy()
        v[:, axis] += theta[cross] * h
        out.append(v)
    if not out:
        raise EmptyRegionError("region has no interface on the grid")
    return np.concatenate(out, axis=0)


def _directed_max_min(src: np.ndarray, dst: np.ndarray, grid: SpatialGrid) -> float:
    best = 0.0
    chunk = max(1, 2_000_000 // max(len(dst), 1))
    for i in range(0, len(src), chunk):
        block = src[i : i + chunk]
        d = grid.torus_distance(block[:, None, :], dst[None, :, :])
        best = max(best, float(np.max(np.min(d, axis=1))))
    return best


def hausdorff(A: Region, B: Region) -> float:
    """Symmetric Hausdorff distance of the zero level sets, Euclidean units."""
    if A.grid != B.grid:
        raise GridMismatchError("regions on different grids")
    if not (A.interior_nonempty() and B.interior_nonempty()):
        raise EmptyRegionError("hausdorff needs nonempty regions")
    pa = boundary_points(A)
    pb = boundary_points(B)
    return max(
        _directed_max_min(pa, pb, A.grid),
        _directed_max_min(pb, pa, A.grid),
    )


def diameter(R: Region) -> float:
    """Largest pairwise torus distance between interface vertices (+ grid slack)."""
    p = boundary_points(R)
    if len(p) > 6000:
        p = p[:: int(np.ceil(len(p) / 6000))]
    best = 0.0
    chunk = max(1, 2_000_000 // len(p))
    for i in range(0, len(p), chunk):
        d = R.grid.torus_distance(p[i : i + chunk, None, :], p[None, :, :])
        best = max(best, float(np.max(d)))
    return best + 2 * R.grid.spacing


def redistance(R: Region) -> Region:
    """Rebuild a Euclidean signed-distance field from the zero level.

    Cell-accurate: uses the Euclidean distance transform on a 3x tiled copy
    so wrap-around neighbours are honoured.
    """
    inside = R.sdf > 0
    if inside.all() or not inside.any():
        big = R.grid.period
        return Region(R.grid, np.where(inside, big, -big), "euclidean")
    reps = (3,) * R.grid.dim
    tiled = np.tile(inside, reps)
    d_out = ndimage.distance_transform_edt(tiled)
    d_in = ndimage.distance_transform_edt(~tiled)
    n = R.grid.cells
    sl = (slice(n, 2 * n),) * R.grid.dim
    signed = np.where(inside, d_out[sl] - 0.5, -(d_in[sl] - 0.5)) * R.grid.spacing
    return Region(R.grid, signed, "euclidean")


def dilate(R: Region, r: float) -> Region:
    """Euclidean dilation by r (erosion for negative r)."""
    if R.units == "euclidean" and _looks_like_sdf(R):
        base = R
    else:
        base = redistance(R)
    return Region(R.grid, base.sdf + r, "euclidean")


def _looks_like_sdf(R: Region) -> bool:
    # primitive rasters are true distance fields; thresholded/warped ones are not
    g = np.abs(np.gradient(R.sdf, R.grid.spacing, axis=0))
    return float(np.median(g)) > 0.5


# ---------------------------------------------------------------------------
# optical-metric balls (eikonal solves)
# ---------------------------------------------------------------------------


def optical_distance(M: geometry.StandardSpacetime, t: float, U: Region) -> np.ndarray:
    """Per-cell distance from U in the optical form of slice t."""
    if U.grid != M.grid:
        raise GridMismatchError("region grid does not match spacetime grid")
    if not U.interior_nonempty():
        raise EmptyRegionError("optical distance from an empty region")
    return eikonal.metric_distance(M.grid, U.sdf, geometry.k_grid(M, t))


def signed_optical_distance(M: geometry.StandardSpacetime, t: float, U: Region) -> np.ndarray:
    """Optical distance to U, negated inside U (distance to the complement)."""
    k = geometry.k_grid(M, t)
    out = eikonal.metric_distance(M.grid, U.sdf, k)
    if U.exterior_nonempty():
        inner = eikonal.metric_distance(M.grid, -U.sdf, k)
        out = np.where(U.sdf > 0, -inner, out)
    return out


def optical_ball(M: geometry.StandardSpacetime, t: float, U: Region, delta: float) -> Region:
    """Open ball of optical radius delta about U on the slice at time t.

    The result's field is ``delta`` minus the signed optical distance: a
    signed distance in optical units, positive inside the ball (in
    particular, zero dilation reproduces U's interior).
    """
    if delta < 0:
        raise DegenerateBallError(f"negative radius {delta}")
    if not U.interior_nonempty():
        raise EmptyRegionError("cannot dilate an empty region")
    dist = signed_optical_distance(M, t, U)
    return Region(M.grid, delta - dist, "optical")


def optical_erode(M: geometry.StandardSpacetime, t: float, R: Region, delta: float) -> Region:
    """Cells deeper than optical distance delta from the complement."""
    dist = optical_distance(M, t, R.complement())
    return Region(M.grid, dist - delta, "optical")


# ---------------------------------------------------------------------------
# contour export
# ---------------------------------------------------------------------------


def contour_polylines(R: Region):
    """Zero-level polylines as arrays of physical (x, y) vertices.

    For 1-d grids each crossing becomes a single-vertex polyline at y = 0.
    """
    if R.grid.dim == 1:
        return [np.array([[float(p[0]), 0.0]]) for p in boundary_points(R)]
    from skimage import measure

    lines = measure.find_contours(R.sdf, 0.0)
    return [line * R.grid.spacing for line in lines]
