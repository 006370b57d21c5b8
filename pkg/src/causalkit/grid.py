"""Flat-torus spatial grids.

The spatial slice is a flat torus: every axis has the same period and the
same number of cells, and all distances/neighbour relations wrap around.
Cell centres sit at ``i * spacing`` for ``i = 0 .. cells-1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on a flat torus of dimension 1 or 2."""

    dim: int
    cells: int
    period: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.dim}")
        if self.cells < 16:
            raise ValueError(f"need at least 16 cells per axis, got {self.cells}")
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")

    @property
    def spacing(self) -> float:
        return self.period / self.cells

    @property
    def shape(self) -> tuple:
        return (self.cells,) * self.dim

    @property
    def n_points(self) -> int:
        return self.cells**self.dim

    def axis(self) -> np.ndarray:
        return np.arange(self.cells) * self.spacing

    def points(self) -> np.ndarray:
        """Cell-centre coordinates, shape ``grid.shape + (dim,)``."""
        ax = self.axis()
        if self.dim == 1:
            return ax[:, None]
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def wrap(self, delta):
        """Minimal-image displacement(s) on the torus."""
        delta = np.asarray(delta, dtype=float)
        return delta - self.period * np.round(delta / self.period)

    def torus_distance(self, a, b):
        """Euclidean distance between point arrays, shortest wrap."""
        d = self.wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        return np.sqrt(np.sum(d * d, axis=-1))

    def sample_field(self, field: np.ndarray, pts: np.ndarray) -> np.ndarray:
        """Periodic multilinear interpolation of a per-cell field at `pts`.

        `pts` has shape ``(..., dim)``; the result has shape ``(...)``.
        """
        pts = np.asarray(pts, dtype=float)
        u = pts / self.spacing
        i0 = np.floor(u).astype(int)
        f = u - i0
        n = self.cells
        if self.dim == 1:
            a = i0[..., 0] % n
            b = (a + 1) % n
            fx = f[..., 0]
            return field[a] * (1 - fx) + field[b] * fx
        ax, ay = i0[..., 0] % n, i0[..., 1] % n
        bx, by = (ax + 1) % n, (ay + 1) % n
        fx, fy = f[..., 0], f[..., 1]
        return (
            field[ax, ay] * (1 - fx) * (1 - fy)
            + field[bx, ay] * fx * (1 - fy)
            + field[ax, by] * (1 - fx) * fy
            + field[bx, by] * fx * fy
        )
