"""Regular pairs of nested slice regions, their preorder, and certificates.

A pair (t, S, T) is regular when S is nonempty, S sits strictly inside T
(margin 2 cells) and T leaves a nonempty exterior (margin 2 cells).  The
preorder between two pairs holds when each development containment does:
S2 inside the development of S1, and T1 inside the development of T2.

``lightspeed_epsilon`` turns the causal-speed estimate into a computed
certificate: with K bounding how much the optical form at the reference
slice can exceed the forms at nearby times over the dilated region, every
inextendible causal curve moves optical distance at most sqrt(K) |t - t'|,
so times within eps = delta / (2 sqrt(K)) keep T inside the development of
its delta-dilation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import geometry, linalg
from .causal import develop, slice_margin
from .errors import (
    DegenerateBallError,
    InclusionChainError,
    TransportError,
)
from .regions import (
    Margin,
    Region,
    _cells,
    containment_margin,
    optical_ball,
    optical_distance,
    redistance,
)
from .util import thread_map


@dataclass(frozen=True)
class CauchyPair:
    """Nested slice subsets (S, T) anchored at time t."""

    t: float
    S: Region
    T: Region


@dataclass(frozen=True)
class RegularityCheck:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


REGULARITY_MARGIN = 2.0


def is_regular(p: CauchyPair, margin: float = REGULARITY_MARGIN) -> RegularityCheck:
    """All pair invariants at the given margin; never raises."""
    if p.S.grid != p.T.grid:
        return RegularityCheck(False, "grid-mismatch")
    if not p.S.interior_nonempty():
        return RegularityCheck(False, "S-empty")
    if containment_margin(p.T, p.S) < margin:
        return RegularityCheck(False, "S-not-inside-T")
    if not p.T.exterior_nonempty(margin):
        return RegularityCheck(False, "T-exterior-empty")
    return RegularityCheck(True)


# ---------------------------------------------------------------------------
# preorder
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrecedesResult:
    ok: bool
    s_margin: float
    t_margin: float

    def __bool__(self):
        return self.ok


def precedes(
    p1: CauchyPair,
    p2: CauchyPair,
    M: geometry.StandardSpacetime,
    m=Margin(2.0),
) -> PrecedesResult:
    """Does p1 precede p2 in M?  (S2 in D(S1) and T1 in D(T2), margin m.)"""
    lo, hi = min(p1.t, p2.t), max(p1.t, p2.t)

    def s_side():
        D = develop(M, p1.t, p1.S, (lo, hi))
        return slice_margin(D, p2.t, p2.S)

    def t_side():
        D = develop(M, p2.t, p2.T, (lo, hi))
        return slice_margin(D, p1.t, p1.T)

    ms, mt = thread_map([s_side, t_side])
    mc = _cells(m)
    return PrecedesResult(ms >= -mc and mt >= -mc, ms, mt)


# ---------------------------------------------------------------------------
# causal-speed window certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LightspeedCertificate:
    K: float
    eps: float
    K_literal: float  # sup taken over [tstar, tstar+delta] only
    delta: float
    tstar: float
    safety: float
    time_samples: int

    def as_dict(self):
        return {
            "K": self.K,
            "eps": self.eps,
            "K_literal": self.K_literal,
            "delta": self.delta,
            "tstar": self.tstar,
            "safety": self.safety,
            "time_samples": self.time_samples,
        }


def lightspeed_epsilon(
    M: geometry.StandardSpacetime,
    T: Region,
    delta: float,
    tstar: float,
    time_samples: int = 13,
    safety: float = 1.05,
    domain: Optional[Region] = None,
) -> LightspeedCertificate:
    """Certified half-width of the valid time window around tstar.

    K is the sampled sup, over times in [tstar - delta, tstar + delta] and
    cells in the closure of the delta-ball about T (or of `domain` if a
    conservative superset is supplied), of the largest generalized
    eigenvalue of k(tstar) against k(tau); eps = delta / (2 sqrt(K)).
    """
    if delta <= 0:
        raise DegenerateBallError(f"delta must be positive, got {delta}")
    if domain is None:
        domain = optical_ball(M, tstar, T, delta)
    if not domain.exterior_nonempty(2.0):
        raise DegenerateBallError(
            "dilated region is not relatively compact with nonempty exterior (margin 2)"
        )

    pts = M.grid.points()
    scale = math.sqrt(float(np.max(linalg.max_eig(geometry.k_grid(M, tstar)))))
    band = 2 * M.grid.spacing * (scale if domain.units == "optical" else 1.0)
    cells = domain.sdf >= -band
    x = pts[cells]
    k0 = geometry.optical_metric(M, tstar, x)

    def sup_over(taus):
        worst = 0.0
        for tau in taus:
            if tau == tstar:
                worst = max(worst, 1.0)
                continue
            ktau = geometry.optical_metric(M, tau, x)
            worst = max(worst, float(np.max(linalg.geneig_max(k0, ktau))))
        return worst

    taus_sym = np.linspace(tstar - delta, tstar + delta, time_samples)
    taus_lit = np.linspace(tstar, tstar + delta, time_samples)
    K_sym = safety * max(1.0, sup_over(taus_sym))
    K_lit = safety * max(1.0, sup_over(taus_lit))
    eps = delta / (2.0 * math.sqrt(K_sym))
    return LightspeedCertificate(K_sym, eps, K_lit, delta, tstar, safety, time_samples)


@dataclass(frozen=True)
class LightspeedReport:
    passed: bool
    worst_margin: float
    checks: list
    certificate: LightspeedCertificate
    seed: int

    def __bool__(self):
        return self.passed

    def as_dict(self):
        return {
            "passed": self.passed,
            "worst_margin_cells": self.worst_margin,
            "checks": self.checks,
            "certificate": self.certificate.as_dict(),
            "seed": self.seed,
        }


def verify_lightspeed(
    M: geometry.StandardSpacetime,
    T: Region,
    delta: float,
    tstar: float,
    samples: int = 20,
    margin: float = 2.0,
    seed: int = 0,
) -> LightspeedReport:
    """Exercise the certified window: for sampled (t, t') in it, T must sit
    inside the development of the delta-ball based at t'."""
    ballT = optical_ball(M, tstar, T, delta)
    cert = lightspeed_epsilon(M, T, delta, tstar)
    rng = np.random.default_rng(seed)
    checks = []
    worst = math.inf
    for _ in range(samples):
        t, tp = tstar + cert.eps * rng.uniform(-1.0, 1.0, size=2)
        D = develop(M, tp, ballT, (min(t, tp), max(t, tp)))
        mg = slice_margin(D, t, T)
        worst = min(worst, mg)
        checks.append({"t": float(t), "t_prime": float(tp), "margin_cells": mg, "ok": mg >= -margin})
    return LightspeedReport(all(c["ok"] for c in checks), worst, checks, cert, seed)


# ---------------------------------------------------------------------------
# ordered pairs from nested chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepCertificate:
    delta: float
    K: float
    eps: float
    tstar: float
    delta_s: float
    delta_t: float
    checks: list

    def __bool__(self):
        return all(c["ok"] for c in self.checks) if self.checks else True

    def as_dict(self):
        return {
            "delta": self.delta,
            "K": self.K,
            "eps": self.eps,
            "tstar": self.tstar,
            "delta_S_side": self.delta_s,
            "delta_T_side": self.delta_t,
            "checks": self.checks,
        }


def step_pairs(
    M: geometry.StandardSpacetime,
    chain,
    tstar: float,
    validate: int = 2,
    margin: float = 2.0,
) -> StepCertificate:
    """Certificate that ``(S1, T1)`` at one time precedes ``(S2, T2)`` at
    another, for any two times within eps of tstar.

    `chain` is the nested quadruple ``(S2, S1, T1, T2)`` with strict
    inclusions.  delta is the largest optical radius with
    ``ball(S2, delta) inside S1`` and ``ball(T1, delta) inside T2`` (the
    smaller of the two signed-field gaps); eps comes from the causal-speed
    bound with that delta.  The postcondition is then spot-validated by
    running the development containments at sampled time offsets.
    """
    S2, S1, T1, T2 = chain
    dist_s = optical_distance(M, tstar, S2)
    out_s1 = S1.sdf <= 0
    if not np.any(out_s1):
        raise InclusionChainError("S1 covers the grid")
    delta_s = float(np.min(dist_s[out_s1]))
    dist_t = optical_distance(M, tstar, T1)
    out_t2 = T2.sdf <= 0
    if not np.any(out_t2):
        raise InclusionChainError("T2 covers the grid")
    delta_t = float(np.min(dist_t[out_t2]))
    delta = min(delta_s, delta_t)
    if delta <= 0:
        raise InclusionChainError(
            f"inclusion chain has zero gap (S-side {delta_s:.3g}, T-side {delta_t:.3g})"
        )

    ball_t1 = Region(M.grid, delta - dist_t, "optical")
    cert = lightspeed_epsilon(M, T1, delta, tstar, domain=ball_t1)

    checks = []
    offsets = [(-0.9, 0.9), (0.9, -0.9), (0.0, 0.0), (-0.9, -0.9), (0.9, 0.9)]
    for a, b in offsets[: max(0, validate)]:
        t1 = tstar + a * cert.eps
        t2 = tstar + b * cert.eps
        res = precedes(CauchyPair(t1, S1, T1), CauchyPair(t2, S2, T2), M, Margin(margin))
        checks.append(
            {"t1": t1, "t2": t2, "s_margin": res.s_margin, "t_margin": res.t_margin, "ok": res.ok}
        )
    return StepCertificate(delta, cert.K, cert.eps, tstar, delta_s, delta_t, checks)


# ---------------------------------------------------------------------------
# morphisms and pair transport
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MorphismSpec:
    """Supported embeddings: time-slab inclusions and scaled diffeomorphisms.

    A scaled diffeomorphism acts as ``(t, x) -> (t / c, f(x))``.  For use as
    a light-cone-narrowing embedding the scale must satisfy
    ``c * |Df u| <= |u|`` everywhere; ``c_max`` records the sampled largest
    admissible value.
    """

    kind: str  # "slab-inclusion" | "scaled-diffeo"
    slab: tuple = (-math.inf, math.inf)
    c: float = 1.0
    f: Optional[Callable] = None
    finv: Optional[Callable] = None
    df: Optional[Callable] = None
    dfinv: Optional[Callable] = None
    c_max: Optional[float] = None
    name: str = ""
    # marks points whose preimage stays in the fundamental patch; None = all
    valid_preimage: Optional[Callable] = None

    def max_push_norm(self, pts) -> float:
        """Largest sampled operator norm of Df."""
        return float(np.max(linalg.spectral_norm(self.df(np.asarray(pts, dtype=float)))))

    def scaling_margin(self, pts) -> float:
        """min over samples of (1 - c * |Df u| / |u|); >= 0 means admissible."""
        return 1.0 - self.c * self.max_push_norm(pts)


def slab_inclusion(lo=-math.inf, hi=math.inf) -> MorphismSpec:
    return MorphismSpec(kind="slab-inclusion", slab=(lo, hi), name=f"slab({lo},{hi})")


def linear_map(lam: float, c: float = 1.0, center=None, period: float = None) -> MorphismSpec:
    """Contraction ``f(x) = x / lam`` (expansion for lam < 1).

    With `center` and `period`, displacements are taken modulo the torus
    about the centre, and points whose true preimage would leave the
    fundamental patch are flagged so warped regions carry no wrap ghosts.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    inv = float(lam)
    c0 = None if center is None else np.asarray(center, dtype=float)

    def disp(x):
        d = np.asarray(x, dtype=float) - c0
        return d - period * np.round(d / period)

    def f(x):
        if c0 is None:
            return np.asarray(x, dtype=float) / inv
        return c0 + disp(x) / inv

    def finv(y):
        if c0 is None:
            return np.asarray(y, dtype=float) * inv
        return c0 + disp(y) * inv

    def df(x):
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        return linalg.identity_like(d, x.shape[:-1]) / inv

    def dfinv(y):
        y = np.asarray(y, dtype=float)
        d = y.shape[-1]
        return linalg.identity_like(d, y.shape[:-1]) * inv

    valid = None
    if c0 is not None and inv > 1.0:

        def valid(y):
            return np.all(np.abs(disp(y)) * inv < period / 2.0, axis=-1)

    return MorphismSpec(
        kind="scaled-diffeo",
        c=c,
        f=f,
        finv=finv,
        df=df,
        dfinv=dfinv,
        c_max=inv,
        name=f"linear(1/{lam})",
        valid_preimage=valid,
    )


def warp_region(R: Region, mapping, valid=None) -> Region:
    """Image of R under a point map given by its inverse: cell x is inside
    the image iff ``mapping(x)`` was inside R.  Result is redistanced."""
    pts = R.grid.points()
    flat = pts.reshape(-1, R.grid.dim)
    pre = mapping(flat).reshape(pts.shape)
    sdf = R.sample(pre)
    if valid is not None:
        ok = np.asarray(valid(pts))
        sdf = np.where(ok, sdf, -R.grid.period)
    return redistance(Region(R.grid, sdf, R.units))


def transport_pair(phi: MorphismSpec, p: CauchyPair, direction: str = "forward") -> CauchyPair:
    """Carry a pair through a supported morphism and re-validate regularity."""
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be forward|inverse, got {direction!r}")
    if phi.kind == "slab-inclusion":
        lo, hi = phi.slab
        if not (lo < p.t < hi):
            raise TransportError(f"pair time {p.t} outside slab ({lo}, {hi})")
        return p
    if phi.kind != "scaled-diffeo":
        raise TransportError(f"unsupported morphism kind {phi.kind!r}")

    if direction == "forward":
        if phi.finv is None:
            raise TransportError("scaled-diffeo needs an inverse sampler for forward transport")
        t_new = p.t / phi.c
        S_new = warp_region(p.S, phi.finv, phi.valid_preimage)
        T_new = warp_region(p.T, phi.finv, phi.valid_preimage)
    else:
        if phi.f is None:
            raise TransportError("scaled-diffeo needs the map itself for inverse transport")
        t_new = p.t * phi.c
        S_new = warp_region(p.S, phi.f)
        T_new = warp_region(p.T, phi.f)
    out = CauchyPair(t_new, S_new, T_new)
    check = is_regular(out)
    if not check:
        raise TransportError(f"transported pair violates regularity: {check.reason}")
    return out
