"""Standard-form spacetimes on R x torus and their optical geometry.

A spacetime is carried by two pure samplers on the slab: a lapse-squared
scalar ``beta(t, x) > 0`` and a spatial Riemannian form ``h(t, x)`` (SPD).
The instantaneous optical form ``k = h / beta`` measures spatial distance in
light travel time; a tangent ``(1, v)`` is timelike exactly when
``k(v, v) < 1``, so light-cone comparisons between two such metrics reduce
to eigenvalue bounds between their optical forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .errors import InvalidMetricError
from .fieldexpr import parse_field_expression
from .grid import SpatialGrid

DEFAULT_CONE_TOL = 1e-10
PARSED_CONE_TOL = 1e-6


@dataclass(frozen=True)
class StandardSpacetime:
    """Metric ``beta dt (x) dt - h_t`` given by samplers on grid points.

    ``beta(t, x)`` maps a scalar time and points shaped ``(..., dim)`` to a
    positive array ``(...)``; ``hmetric(t, x)`` returns SPD forms shaped
    ``(..., dim, dim)``.  Samplers must be pure.
    """

    grid: SpatialGrid
    beta: Callable
    hmetric: Callable
    name: str = ""
    time_dependent: bool = True
    parsed: bool = False  # coefficients come from expression text


@dataclass(frozen=True)
class OpticalForm:
    """Instantaneous optical form at a point (units time^2 / length^2)."""

    k: np.ndarray

    def __post_init__(self):
        if linalg.min_eig(self.k) <= 0:
            raise InvalidMetricError("optical form not positive definite")


def _as_points(grid, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != grid.dim:
        raise ValueError(f"points have dimension {x.shape[-1]}, grid has {grid.dim}")
    return x


def beta_at(M: StandardSpacetime, t: float, x) -> np.ndarray:
    x = _as_points(M.grid, x)
    b = np.asarray(M.beta(t, x), dtype=float)
    if np.any(b <= 0) or not np.all(np.isfinite(b)):
        raise InvalidMetricError(f"beta non-positive at t={t}")
    return b


def h_at(M: StandardSpacetime, t: float, x) -> np.ndarray:
    x = _as_points(M.grid, x)
    h = np.asarray(M.hmetric(t, x), dtype=float)
    if np.any(linalg.min_eig(h) <= 0) or not np.all(np.isfinite(h)):
        raise InvalidMetricError(f"spatial metric not positive definite at t={t}")
    return h


def optical_metric(M: StandardSpacetime, t: float, x) -> np.ndarray:
    """Optical form ``h / beta`` at (t, x); shape ``(..., dim, dim)``."""
    b = beta_at(M, t, x)
    h = h_at(M, t, x)
    return h / b[..., None, None]


def k_grid(M: StandardSpacetime, t: float) -> np.ndarray:
    """Optical form sampled at every cell centre."""
    return optical_metric(M, t, M.grid.points())


def kinv_grid(M: StandardSpacetime, t: float) -> np.ndarray:
    return linalg.inv_spd(k_grid(M, t))


def max_speed(M: StandardSpacetime, t: float) -> float:
    """Fastest coordinate light speed on the slice (sqrt of max eig of k^-1)."""
    return float(np.sqrt(np.max(linalg.max_eig(kinv_grid(M, t)))))


def cone_margin(Ma: StandardSpacetime, Mb: StandardSpacetime, t: float, x) -> np.ndarray:
    """Min eigenvalue of ``k_a - k_b`` at (t, x): >= 0 iff cone(a) inside cone(b)."""
    ka = optical_metric(Ma, t, x)
    kb = optical_metric(Mb, t, x)
    return linalg.min_eig(ka - kb)


def cone_contained(Ma, Mb, t: float, x, tol: float = None):
    """True iff every Ma-timelike tangent at (t, x) is Mb-timelike.

    The default tolerance separates float error (1e-10, analytic samplers)
    from modelling error (1e-6 when either metric was parsed from text).
    For points batched over leading axes an array of booleans is returned.
    """
    if tol is None:
        tol = PARSED_CONE_TOL if (Ma.parsed or Mb.parsed) else DEFAULT_CONE_TOL
    m = cone_margin(Ma, Mb, t, x)
    out = m >= -tol
    return bool(out) if np.isscalar(out) or out.ndim == 0 else out


# ---------------------------------------------------------------------------
# builtin spacetimes
# ---------------------------------------------------------------------------


def minkowski(grid: SpatialGrid) -> StandardSpacetime:
    """Flat metric: beta = 1, h = identity."""
    eye = np.eye(grid.dim)

    def beta(t, x):
        x = np.asarray(x, dtype=float)
        return np.ones(x.shape[:-1])

    def h(t, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(eye, x.shape[:-1] + (grid.dim, grid.dim)).copy()

    return StandardSpacetime(grid, beta, h, name="minkowski", time_dependent=False)


def ultrastatic(grid: SpatialGrid, k_scale: float = 1.0) -> StandardSpacetime:
    """beta = 1 with time-independent ``h = k_scale * identity``."""
    if k_scale <= 0:
        raise InvalidMetricError("k_scale must be positive")
    eye = np.eye(grid.dim) * k_scale

    def beta(t, x):
        x = np.asarray(x, dtype=float)
        return np.ones(x.shape[:-1])

    def h(t, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(eye, x.shape[:-1] + (grid.dim, grid.dim)).copy()

    return StandardSpacetime(
        grid, beta, h, name=f"ultrastatic(k={k_scale})", time_dependent=False
    )


def from_expressions(grid: SpatialGrid, beta_src: str, h_src) -> StandardSpacetime:
    """Spacetime from expression text.

    ``h_src`` is either a single expression (scalar multiple of the identity)
    or a ``dim x dim`` nested list of expressions (must be symmetric).
    """
    beta_fn = parse_field_expression(beta_src)
    used = set(beta_fn.variables)

    if isinstance(h_src, str):
        scal = parse_field_expression(h_src)
        used |= scal.variables
        eye = np.eye(grid.dim)

        def h(t, x):
            x = np.asarray(x, dtype=float)
            s = scal(t, x)
            return s[..., None, None] * eye

    else:
        entries = [[parse_field_expression(e) for e in row] for row in h_src]
        d = grid.dim
        if len(entries) != d or any(len(r) != d for r in entries):
            raise ValueError(f"h matrix must be {d}x{d}")
        for row in entries:
            for e in row:
                used |= e.variables

        def h(t, x):
            x = np.asarray(x, dtype=float)
            out = np.empty(x.shape[:-1] + (d, d))
            for i in range(d):
                for j in range(d):
                    out[..., i, j] = entries[i][j](t, x)
            out = 0.5 * (out + np.swapaxes(out, -1, -2))
            return out

    return StandardSpacetime(
        grid,
        beta_fn,
        h,
        name="expression",
        time_dependent="t" in used,
        parsed=True,
    )
