"""Interpolating metrics between two spacetimes, and chain verification.

``interpolate`` builds a metric g that agrees with the first input up to t1
and with the second from t2 on, while keeping the optical form above each
input's on the overlapping slabs (t < t2p against the first, t > t1p
against the second).  Since a larger optical form means a narrower light
cone, every g-timelike vector is timelike for the respective input there,
which is exactly the cone condition the deformation argument needs.

``verify_theorem_chain`` replays the deformation proof pattern numerically:
pick ordered pairs on nearby slices in each spacetime through gap/window
certificates, build the interpolating metric with nested switch times, and
check the resulting composite pair ordering directly by development
containments in the interpolated spacetime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .causal import develop
from .errors import GridMismatchError, InclusionChainError
from .grid import SpatialGrid
from .pairs import (
    CauchyPair,
    Margin,
    is_regular,
    lightspeed_epsilon,
    precedes,
    slab_inclusion,
    transport_pair,
)
from .regions import Region, optical_distance, redistance
from .util import thread_map


@dataclass(frozen=True)
class InterpolationTimes:
    t1: float
    t1p: float
    t2p: float
    t2: float

    def __post_init__(self):
        if not (self.t1 < self.t1p < self.t2p < self.t2):
            raise ValueError(
                f"need t1 < t1p < t2p < t2, got {self.t1}, {self.t1p}, {self.t2p}, {self.t2}"
            )


def smoothstep(u):
    """C^2 quintic step: 0 for u <= 0, 1 for u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


def _falling(t, lo, hi):
    return 1.0 - smoothstep((t - lo) / (hi - lo))


def interpolate(
    M1: geometry.StandardSpacetime,
    M2: geometry.StandardSpacetime,
    times: InterpolationTimes,
) -> geometry.StandardSpacetime:
    """Metric equal to M1 for t <= t1 and M2 for t >= t2, cone conditions on
    the overlap by construction (optical form is a plateaued sum)."""
    if M1.grid != M2.grid:
        raise GridMismatchError("interpolation requires a shared grid")
    T = times

    def weights(t):
        w = _falling(t, T.t1, T.t2)  # beta blend: 1 -> 0
        w1 = _falling(t, T.t2p, T.t2)  # plateau 1 until t2p
        w2 = 1.0 - _falling(t, T.t1, T.t1p)  # plateau 1 from t1p
        return w, w1, w2

    def beta(t, x):
        if t <= T.t1:
            return M1.beta(t, x)
        if t >= T.t2:
            return M2.beta(t, x)
        w, _, _ = weights(t)
        return w * np.asarray(M1.beta(t, x), dtype=float) + (1.0 - w) * np.asarray(
            M2.beta(t, x), dtype=float
        )

    def hmetric(t, x):
        if t <= T.t1:
            return M1.hmetric(t, x)
        if t >= T.t2:
            return M2.hmetric(t, x)
        w, w1, w2 = weights(t)
        b1 = np.asarray(M1.beta(t, x), dtype=float)[..., None, None]
        b2 = np.asarray(M2.beta(t, x), dtype=float)[..., None, None]
        k1 = np.asarray(M1.hmetric(t, x), dtype=float) / b1
        k2 = np.asarray(M2.hmetric(t, x), dtype=float) / b2
        k = w1 * k1 + w2 * k2
        bg = w * b1 + (1.0 - w) * b2
        return bg * k

    name = f"interpolate({M1.name or 'M1'}, {M2.name or 'M2'})"
    return geometry.StandardSpacetime(M1.grid, beta, hmetric, name=name, time_dependent=True)


@dataclass(frozen=True)
class InterpolationReport:
    passed: bool
    worst_endpoint_rel: float
    worst_cone_margin_1: float
    worst_cone_margin_2: float
    failures: int
    samples: int
    seed: int

    def __bool__(self):
        return self.passed

    def as_dict(self):
        return {
            "passed": self.passed,
            "worst_endpoint_rel": self.worst_endpoint_rel,
            "worst_cone_margin_vs_M1": self.worst_cone_margin_1,
            "worst_cone_margin_vs_M2": self.worst_cone_margin_2,
            "failures": self.failures,
            "samples": self.samples,
            "seed": self.seed,
        }


def verify_interpolation(
    g: geometry.StandardSpacetime,
    M1: geometry.StandardSpacetime,
    M2: geometry.StandardSpacetime,
    times: InterpolationTimes,
    samples: int = 200,
    endpoint_rtol: float = 1e-12,
    cone_tol: float = geometry.DEFAULT_CONE_TOL,
    seed: int = 0,
) -> InterpolationReport:
    """Sample the three slabs: endpoint equality outside [t1, t2] and the
    two cone-nesting conditions on their slabs.  Failures are recorded, not
    raised."""
    rng = np.random.default_rng(seed)
    T = times
    span = T.t2 - T.t1
    grid = g.grid
    failures = 0
    worst_rel = 0.0

    def rand_x(n):
        return rng.uniform(0.0, grid.period, size=(n, grid.dim))

    for t_lo, t_hi, M in ((T.t1 - span, T.t1, M1), (T.t2, T.t2 + span, M2)):
        for _ in range(max(1, samples // 10)):
            t = rng.uniform(t_lo, t_hi)
            x = rand_x(8)
            bg, bm = geometry.beta_at(g, t, x), geometry.beta_at(M, t, x)
            hg, hm = geometry.h_at(g, t, x), geometry.h_at(M, t, x)
            rel = max(
                float(np.max(np.abs(bg - bm) / np.abs(bm))),
                float(np.max(np.abs(hg - hm) / np.maximum(np.abs(hm), 1e-300))),
            )
            worst_rel = max(worst_rel, rel)
            if rel > endpoint_rtol:
                failures += 1

    worst1 = math.inf
    worst2 = math.inf
    for _ in range(samples):
        t = rng.uniform(T.t1 - 0.1 * span, T.t2p)
        x = rand_x(8)
        m = float(np.min(geometry.cone_margin(g, M1, t, x)))
        worst1 = min(worst1, m)
        if m < -cone_tol:
            failures += 1
        t = rng.uniform(T.t1p, T.t2 + 0.1 * span)
        x = rand_x(8)
        m = float(np.min(geometry.cone_margin(g, M2, t, x)))
        worst2 = min(worst2, m)
        if m < -cone_tol:
            failures += 1

    return InterpolationReport(
        failures == 0, worst_rel, worst1, worst2, failures, samples, seed
    )


# ---------------------------------------------------------------------------
# Cauchy chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CauchyChain:
    """Composable chain of supported morphisms (the only representation of
    the induced isomorphism kept here)."""

    entries: tuple  # of (MorphismSpec, str direction)
    grid: SpatialGrid

    def transport(self, p: CauchyPair) -> CauchyPair:
        for spec, direction in self.entries:
            p = transport_pair(spec, p, direction)
        return p


def interpolation_chain(times: InterpolationTimes, grid: SpatialGrid) -> CauchyChain:
    """The five-spacetime diagram's morphisms for an interpolation: past slab
    into the first metric, past slab into the interpolated one, future slab
    into the interpolated one, future slab into the second metric."""
    P = slab_inclusion(-math.inf, times.t1)
    F = slab_inclusion(times.t2, math.inf)
    return CauchyChain(
        entries=((P, "forward"), (P, "inverse"), (F, "forward"), (F, "inverse")),
        grid=grid,
    )


# ---------------------------------------------------------------------------
# chain replay
# ---------------------------------------------------------------------------


def _inner_pair(M, t, S, T, frac):
    """Regions strictly between S and T (optical gap split at frac and
    1 - frac), plus the certified step data for chain S < S* < T* < T.

    Returns (S*, T*, delta, certificate): the pair at a nearby time that
    precedes (S, T) under the step estimate.
    """
    dist_s = optical_distance(M, t, S)
    outside_T = T.sdf <= 0
    if not np.any(outside_T):
        raise InclusionChainError("T covers the grid")
    gap = float(np.min(dist_s[outside_T]))
    if gap <= 0:
        raise InclusionChainError("no optical gap between S and the exterior of T")
    a = frac * gap
    S_star = redistance(Region(M.grid, a - dist_s, "optical"))
    dist_tc = optical_distance(M, t, T.complement())
    T_star = redistance(Region(M.grid, dist_tc - a, "optical"))
    # ball(T*, a) stays inside T, so T is an admissible (conservative) domain
    cert = lightspeed_epsilon(M, T_star, a, t, domain=T)
    return S_star, T_star, a, cert


def _outer_pair(M, t, S, T, frac):
    """Regions strictly bracketing (S, T) from outside: S* inside S, T*
    containing T, with certified step data for chain S* < S < T < T*."""
    dist_sc = optical_distance(M, t, S.complement())
    inradius = float(np.max(dist_sc))
    dist_t = optical_distance(M, t, T)
    room = float(np.max(dist_t))
    a = frac * min(inradius, 0.5 * room)
    if a <= 0:
        raise InclusionChainError("no room to bracket the pair from outside")
    S_star = redistance(Region(M.grid, dist_sc - a, "optical"))
    T_star = redistance(Region(M.grid, a - dist_t, "optical"))
    cert = lightspeed_epsilon(M, T, a, t, domain=T_star)
    return S_star, T_star, a, cert


def _region_info(R):
    return {"area": R.area()}


@dataclass(frozen=True)
class ChainReport:
    mode: str
    passed: bool
    t_star: float
    t_far: float
    times: InterpolationTimes
    per_pair: list
    checks: list

    def __bool__(self):
        return self.passed

    def as_dict(self):
        return {
            "mode": self.mode,
            "passed": self.passed,
            "t_star": self.t_star,
            "t_far": self.t_far,
            "interpolation_times": [self.times.t1, self.times.t1p, self.times.t2p, self.times.t2],
            "pairs": self.per_pair,
            "checks": self.checks,
        }


def verify_theorem_chain(
    M_near: geometry.StandardSpacetime,
    M_far: geometry.StandardSpacetime,
    pairs,
    mode: str = "split",
    margin: float = 2.0,
    frac: float = 1.0 / 3.0,
) -> ChainReport:
    """Replay a deformation argument for the given pairs (all on one slice).

    mode 'split': pairs ordered down toward the input pair; 'rs': ordered up
    away from it; 'both': one chain of each; 'weak-distal': the eight-region
    chain with three step orderings plus the composite.  Every final check
    is a development containment in the interpolating spacetime at `margin`
    cells (the weak-distal step orderings run in their own metrics).
    """
    if mode not in ("split", "rs", "both", "weak-distal"):
        raise ValueError(f"unknown mode {mode!r}")
    if M_near.grid != M_far.grid:
        raise GridMismatchError("both spacetimes must share one grid")
    pairs = list(pairs)
    t_p = pairs[0].t
    if any(abs(p.t - t_p) > 1e-12 for p in pairs):
        raise ValueError("all pairs must share one time slice")
    for p in pairs:
        chk = is_regular(p)
        if not chk:
            raise InclusionChainError(f"input pair not regular: {chk.reason}")

    if mode == "weak-distal":
        return _weak_distal_chain(M_near, M_far, pairs, t_p, margin)

    stage_M = []
    eps_M = math.inf
    for p in pairs:
        entry = {}
        if mode in ("split", "both"):
            S_in, T_in, d_in, cert_in = _inner_pair(M_near, t_p, p.S, p.T, frac)
            entry["inner"] = {
                "delta": d_in,
                **cert_in.as_dict(),
                "S": _region_info(S_in),
                "T": _region_info(T_in),
            }
            entry["_inner"] = (S_in, T_in)
            eps_M = min(eps_M, cert_in.eps)
        if mode in ("rs", "both"):
            S_out, T_out, d_out, cert_out = _outer_pair(M_near, t_p, p.S, p.T, frac)
            entry["outer"] = {
                "delta": d_out,
                **cert_out.as_dict(),
                "S": _region_info(S_out),
                "T": _region_info(T_out),
            }
            entry["_outer"] = (S_out, T_out)
            eps_M = min(eps_M, cert_out.eps)
        stage_M.append(entry)

    t_star = t_p + eps_M / 2.0

    stage_N = []
    eps_N = math.inf
    for entry in stage_M:
        nentry = {}
        if "_inner" in entry:
            S_in, T_in = entry["_inner"]
            S2, T2, d2, cert2 = _inner_pair(M_far, t_star, S_in, T_in, frac)
            nentry["inner"] = {
                "delta": d2,
                **cert2.as_dict(),
                "S": _region_info(S2),
                "T": _region_info(T2),
            }
            nentry["_inner"] = (S2, T2)
            eps_N = min(eps_N, cert2.eps)
        if "_outer" in entry:
            S_out, T_out = entry["_outer"]
            S2, T2, d2, cert2 = _outer_pair(M_far, t_star, S_out, T_out, frac)
            nentry["outer"] = {
                "delta": d2,
                **cert2.as_dict(),
                "S": _region_info(S2),
                "T": _region_info(T2),
            }
            nentry["_outer"] = (S2, T2)
            eps_N = min(eps_N, cert2.eps)
        stage_N.append(nentry)

    t_far = t_star + eps_N / 2.0
    third_lo = (t_star - t_p) / 3.0
    third_hi = (t_far - t_star) / 3.0
    times = InterpolationTimes(
        t_p + third_lo, t_p + 2 * third_lo, t_star + third_hi, t_star + 2 * third_hi
    )
    I = interpolate(M_near, M_far, times)

    checks = []
    jobs = []
    for j, (p, nentry) in enumerate(zip(pairs, stage_N)):
        if "_inner" in nentry:
            S2, T2 = nentry["_inner"]
            far_pair = CauchyPair(t_far, S2, T2)

            def job(fp=far_pair, pp=p, idx=j):
                res = precedes(fp, pp, I, Margin(margin))
                return {
                    "pair": idx,
                    "ordering": "far-precedes-input",
                    "s_margin": res.s_margin,
                    "t_margin": res.t_margin,
                    "ok": res.ok,
                }

            jobs.append(job)
        if "_outer" in nentry:
            S2, T2 = nentry["_outer"]
            far_pair = CauchyPair(t_far, S2, T2)

            def job(fp=far_pair, pp=p, idx=j):
                res = precedes(pp, fp, I, Margin(margin))
                return {
                    "pair": idx,
                    "ordering": "input-precedes-far",
                    "s_margin": res.s_margin,
                    "t_margin": res.t_margin,
                    "ok": res.ok,
                }

            jobs.append(job)
    checks = thread_map(jobs)

    per_pair = []
    for entry, nentry in zip(stage_M, stage_N):
        per_pair.append(
            {
                "stage_near": {k: v for k, v in entry.items() if not k.startswith("_")},
                "stage_far": {k: v for k, v in nentry.items() if not k.startswith("_")},
            }
        )
    passed = all(c["ok"] for c in checks)
    return ChainReport(mode, passed, t_star, t_far, times, per_pair, checks)


def _weak_distal_chain(M_near, M_far, pairs, t_p, margin):
    """Eight nested regions between S and the exterior of T; three step
    orderings (two in the far spacetime, one in the near one) and the
    composite containment in the interpolated metric."""
    if len(pairs) != 1:
        raise ValueError("weak-distal mode takes exactly one pair")
    p = pairs[0]
    S, T = p.S, p.T

    dist_s = optical_distance(M_near, t_p, S)
    outside_T = T.sdf <= 0
    gap = float(np.min(dist_s[outside_T]))
    if gap <= 0:
        raise InclusionChainError("no optical gap between S and the exterior of T")
    u = gap / 7.0
    dist_tc = optical_distance(M_near, t_p, T.complement())

    def sublevel(dist, r):
        return redistance(Region(M_near.grid, r - dist, "optical"))

    def erosion(dist, r):
        return redistance(Region(M_near.grid, dist - r, "optical"))

    S_star = sublevel(dist_s, u)
    S_far = sublevel(dist_s, 2 * u)
    S_tilde = sublevel(dist_s, 3 * u)
    T_tilde = erosion(dist_tc, 3 * u)
    T_far = erosion(dist_tc, 2 * u)
    T_star = erosion(dist_tc, u)

    def gap_between(M, t, inner, outer):
        d = optical_distance(M, t, inner)
        out = outer.sdf <= 0
        g = float(np.min(d[out]))
        if g <= 0:
            raise InclusionChainError("chain construction produced a zero gap")
        return g, d

    # ordering (S_tilde, T_tilde)_tp < (S_far, T_far)_tfar in the far metric
    gL1, _ = gap_between(M_far, t_p, S_far, S_tilde)
    gL2, _ = gap_between(M_far, t_p, T_tilde, T_far)
    dL = min(gL1, gL2)
    certL = lightspeed_epsilon(M_far, T_tilde, dL, t_p, domain=T_far)
    # ordering (S_star, T_star)_tstar < (S, T)_tp in the near metric
    gR1, _ = gap_between(M_near, t_p, S, S_star)
    gR2, _ = gap_between(M_near, t_p, T_star, T)
    dR = min(gR1, gR2)
    certR = lightspeed_epsilon(M_near, T_star, dR, t_p, domain=T)

    t_far = t_p + min(certL.eps, certR.eps) / 2.0
    # central ordering (S_far, T_far)_tfar < (S_star, T_star)_tstar, far metric
    gC1, _ = gap_between(M_far, t_far, S_star, S_far)
    gC2, _ = gap_between(M_far, t_far, T_far, T_star)
    dC = min(gC1, gC2)
    certC = lightspeed_epsilon(M_far, T_far, dC, t_far, domain=T_star)
    t_star = t_far - min(certC.eps, t_far - t_p) / 2.0

    third_lo = (t_star - t_p) / 3.0
    third_hi = (t_far - t_star) / 3.0
    times = InterpolationTimes(
        t_p + third_lo, t_p + 2 * third_lo, t_star + third_hi, t_star + 2 * third_hi
    )
    I = interpolate(M_near, M_far, times)

    pair_tilde = CauchyPair(t_p, S_tilde, T_tilde)
    pair_far = CauchyPair(t_far, S_far, T_far)
    pair_star = CauchyPair(t_star, S_star, T_star)

    jobs = [
        lambda: ("tilde-precedes-far (far metric)", precedes(pair_tilde, pair_far, M_far, Margin(margin))),
        lambda: ("far-precedes-star (far metric)", precedes(pair_far, pair_star, M_far, Margin(margin))),
        lambda: ("star-precedes-input (near metric)", precedes(pair_star, p, M_near, Margin(margin))),
        lambda: ("far-precedes-input (interpolated)", precedes(pair_far, p, I, Margin(margin))),
    ]
    results = thread_map(jobs)
    checks = [
        {"ordering": name, "s_margin": r.s_margin, "t_margin": r.t_margin, "ok": r.ok}
        for name, r in results
    ]
    per_pair = [
        {
            "radii_optical": [u * j for j in (1, 2, 3)],
            "regions": {
                "S": _region_info(S),
                "S_star": _region_info(S_star),
                "S_far": _region_info(S_far),
                "S_tilde": _region_info(S_tilde),
                "T_tilde": _region_info(T_tilde),
                "T_far": _region_info(T_far),
                "T_star": _region_info(T_star),
                "T": _region_info(T),
            },
            "step_certificates": {
                "left": {**certL.as_dict(), "delta": dL},
                "central": {**certC.as_dict(), "delta": dC},
                "right": {**certR.as_dict(), "delta": dR},
            },
        }
    ]
    passed = all(c["ok"] for c in checks)
    return ChainReport("weak-distal", passed, t_star, t_far, times, per_pair, checks)
