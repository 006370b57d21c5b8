"""Cauchy developments by level-set front propagation.

The development of a slice subset U is computed through its complement: a
point of a later/earlier slice belongs to the development exactly when the
optical-speed-1 reachable set of the complement has not arrived there.  The
level function starts from U's signed field and erodes under

    psi_t + sqrt(grad psi . k^-1 grad psi) = 0,

stepped with a first-order monotone upwind (Godunov) Hamiltonian under a
CFL bound, with the optical form sampled at step midpoints.  Monotonicity
of the scheme gives the nesting and comparison properties downstream
checks rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry, linalg
from .errors import CFLError, EmptyRegionError, GridMismatchError, HorizonError
from .regions import Margin, Region, contains

CFL_NUMBER = 0.4
_CROSS_DIRECTIONS = 96


@dataclass(frozen=True, eq=False)
class DevelopmentField:
    """Time-indexed slices of a development, on the solver's time grid."""

    M: geometry.StandardSpacetime
    t0: float
    base: Region
    times: np.ndarray
    psi: np.ndarray  # (len(times),) + grid.shape
    dt: float
    vmax: float

    def slice(self, t: float) -> Region:
        j = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[j] - t) > self.dt / 2 + 1e-12:
            raise HorizonError(
                f"t={t} outside computed horizon [{self.times[0]}, {self.times[-1]}]"
            )
        return Region(self.base.grid, self.psi[j], self.base.units)

    def slice_regions(self):
        return [Region(self.base.grid, p, self.base.units) for p in self.psi]

    def areas(self):
        h = self.base.grid.spacing ** self.base.grid.dim
        return [float(np.count_nonzero(p > 0)) * h for p in self.psi]

    def summary(self) -> dict:
        return {
            "t0": self.t0,
            "dt": self.dt,
            "vmax": self.vmax,
            "times": [float(t) for t in self.times],
            "areas": self.areas(),
        }


def _hamiltonian(psi, A, h):
    """Monotone upwind discretisation of sqrt(grad psi . A grad psi)."""
    dim = psi.ndim
    if dim == 1:
        dm = (psi - np.roll(psi, 1)) / h
        dp = (np.roll(psi, -1) - psi) / h
        g = np.maximum(np.maximum(dm, 0.0) ** 2, np.minimum(dp, 0.0) ** 2)
        return np.sqrt(A[:, 0, 0] * g)

    dmx = (psi - np.roll(psi, 1, axis=0)) / h
    dpx = (np.roll(psi, -1, axis=0) - psi) / h
    dmy = (psi - np.roll(psi, 1, axis=1)) / h
    dpy = (np.roll(psi, -1, axis=1) - psi) / h

    off = np.max(np.abs(A[..., 0, 1]))
    scale = math.sqrt(float(np.max(A[..., 0, 0])) * float(np.max(A[..., 1, 1])))
    if off <= 1e-13 * max(scale, 1e-300):
        gx = np.maximum(np.maximum(dmx, 0.0) ** 2, np.minimum(dpx, 0.0) ** 2)
        gy = np.maximum(np.maximum(dmy, 0.0) ** 2, np.minimum(dpy, 0.0) ** 2)
        return np.sqrt(A[..., 0, 0] * gx + A[..., 1, 1] * gy)

    # cross terms: support-function form, maximised over sampled unit-k velocities
    k = linalg.inv_spd(A)
    theta = (np.arange(_CROSS_DIRECTIONS) + 0.5) * (2 * np.pi / _CROSS_DIRECTIONS)
    H = np.full(psi.shape, -np.inf)
    kxx, kxy, kyy = k[..., 0, 0], k[..., 0, 1], k[..., 1, 1]
    for th in theta:
        cx, cy = math.cos(th), math.sin(th)
        norm = np.sqrt(kxx * cx * cx + 2 * kxy * cx * cy + kyy * cy * cy)
        vx = cx / norm
        vy = cy / norm
        flux = (
            np.maximum(vx, 0.0) * dmx
            + np.minimum(vx, 0.0) * dpx
            + np.maximum(vy, 0.0) * dmy
            + np.minimum(vy, 0.0) * dpy
        )
        np.maximum(H, flux, out=H)
    return np.maximum(H, 0.0)


def _speed_bound(M, t):
    return geometry.max_speed(M, t)


def develop(
    M: geometry.StandardSpacetime,
    t0: float,
    U: Region,
    horizon,
    cfl: float = CFL_NUMBER,
) -> DevelopmentField:
    """Development of the slice set U at time t0, over ``horizon=(lo, hi)``.

    Raises CFLError if the optical speed grows past the bound estimated when
    the step was fixed.
    """
    if U.grid != M.grid:
        raise GridMismatchError("region grid does not match spacetime grid")
    if not U.interior_nonempty():
        raise EmptyRegionError("cannot develop an empty region")
    lo, hi = float(horizon[0]), float(horizon[1])
    if not (lo <= t0 <= hi):
        raise HorizonError(f"horizon [{lo}, {hi}] does not contain t0={t0}")

    h = M.grid.spacing
    if M.time_dependent:
        scan = np.linspace(lo, hi, 17)
        vmax = max(_speed_bound(M, t) for t in scan)
    else:
        vmax = _speed_bound(M, t0)
    vmax = max(vmax, 1e-12)
    dt = cfl * h / vmax
    span = hi - lo
    if span > 0:
        dt = min(dt, span / 4)

    n_steps = int(math.ceil((t0 - lo) / dt - 1e-9)) + int(math.ceil((hi - t0) / dt - 1e-9))
    est_bytes = (n_steps + 1) * 8 * M.grid.n_points
    if est_bytes > 2_000_000_000:
        raise HorizonError(
            f"development would store {n_steps + 1} slices (~{est_bytes / 1e9:.1f} GB); "
            "shorten the horizon or coarsen the grid"
        )

    A_static = None
    if not M.time_dependent:
        A_static = geometry.kinv_grid(M, t0)

    def run_side(sign, t_end):
        """March from t0 toward t_end; returns psi stack excluding psi0."""
        steps = int(math.ceil(abs(t_end - t0) / dt - 1e-9))
        out = np.empty((steps,) + M.grid.shape)
        psi = U.sdf.astype(float)
        t = t0
        for s in range(steps):
            t_mid = t + sign * dt / 2
            if A_static is not None:
                A = A_static
            else:
                A = geometry.kinv_grid(M, t_mid)
                v = float(np.sqrt(np.max(linalg.max_eig(A))))
                # dt keeps the scheme monotone up to speed 1.25 * vmax; abort
                # well before that if the scan estimate is overtaken mid-run
                if v > vmax * 1.02:
                    raise CFLError(
                        f"optical speed {v:.6g} exceeded bound {vmax:.6g} "
                        f"at t={t_mid:.6g} (step {s}, dt={dt:.3g})"
                    )
            psi = psi - dt * _hamiltonian(psi, A, h)
            out[s] = psi
            t += sign * dt
        return out

    fwd = run_side(+1, hi)
    bwd = run_side(-1, lo)

    n_b, n_f = len(bwd), len(fwd)
    times = t0 + dt * np.arange(-n_b, n_f + 1)
    psi = np.concatenate([bwd[::-1], U.sdf[None, ...].astype(float), fwd], axis=0)
    return DevelopmentField(M, t0, U, times, psi, dt, vmax)


def slice_contained(D: DevelopmentField, t: float, T: Region, m=Margin(0.0)) -> bool:
    """Is T inside the development slice at time t, at the given margin?"""
    return contains(D.slice(t), T, m)


def slice_margin(D: DevelopmentField, t: float, T: Region) -> float:
    from .regions import containment_margin

    return containment_margin(D.slice(t), T)
