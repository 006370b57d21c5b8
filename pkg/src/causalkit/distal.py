"""Distal-split toolbox: radial bumps, the inflationary metric, and the
calculus of upper bounds on splitting distances.

The distance model tabulates, per ball radius, the best proven upper bound
on the splitting distance of a centred ball.  Rules only ever tighten
entries:

* dilation:   d(B(r)) <= d(B(r')) + (r' - r) for r' >= r
* set bound:  d(S) <= inf_{R > diam(S)} (R + dbar(R))
* scaling:    d(lambda S) <= lambda * d+(S), with d+ the upper splitting
              distance (min over a fixed dilation grid here)
* diffeo:     d(S) <= inf{rho : f^-1(ball(f(S), r + 2 eps)) inside ball(S, rho)}
              and d(S) <= kappa * d+(f(S)), kappa = sup |D(f^-1)| off f(S)
* bisection:  d(B(r)) <= d(B(r+eps)) / 2^(2^k) + (1 - 2^(-2^k)) eps / 2^(k-1)

Seeding any single radius with a finite bound lets the combined rules drive
every tabulated radius below an arbitrary positive target.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import BumpConstructionError, InclusionChainError
from .grid import SpatialGrid
from .pairs import MorphismSpec
from .regions import Region, diameter, dilate, redistance

EPS_DILATION_GRID = (0.1, 0.05, 0.025, 0.0125)
_SMOOTHSTEP_MAX_SLOPE = 30.0 / 16.0  # max of 30 u^2 (1-u)^2
_DECAY_SLOPE_BOUND = 0.9


# ---------------------------------------------------------------------------
# radial bump and diffeomorphism
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialBump:
    """Piecewise-polynomial profile: zero out to rstar, matching
    ``rho - rstar`` on [rstar+rho1, rstar+rho2], then decaying back to zero
    inside the support with slope > -1."""

    rstar: float
    rho1: float
    rho2: float
    support: float
    breaks: np.ndarray  # section left endpoints
    coeffs: tuple  # per-section poly coefficients in (rho - left), ascending
    min_slope: float  # densely sampled lower bound on chi'

    def chi(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for lo, hi, cf in self._sections():
            m = (rho >= lo) & (rho < hi)
            if np.any(m):
                d = rho[m] - lo
                out[m] = _polyval(cf, d)
        return out if out.ndim else float(out)

    def chi_prime(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for lo, hi, cf in self._sections():
            m = (rho >= lo) & (rho < hi)
            if np.any(m):
                d = rho[m] - lo
                out[m] = _polyval(_polyder(cf), d)
        return out if out.ndim else float(out)

    def _sections(self):
        edges = list(self.breaks) + [math.inf]
        return [(edges[i], edges[i + 1], self.coeffs[i]) for i in range(len(self.coeffs))]


def _polyval(coeffs, x):
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _polyder(coeffs):
    return [c * i for i, c in enumerate(coeffs)][1:] or [0.0]


def build_radial_bump(rstar, rho1, rho2, support, samples: int = 10_000) -> RadialBump:
    """Construct the profile and validate its invariants by dense sampling.

    Sections: zero | quintic blend up to slope 1 | exact linear | a short
    turnaround bringing the slope back to 0 | a stretched quintic decay whose
    slope stays above -0.9 by construction.
    """
    if not (0 < rho1 < rho2):
        raise BumpConstructionError(f"need 0 < rho1 < rho2, got {rho1}, {rho2}")
    if not rho2 < support - rstar:
        raise BumpConstructionError(
            f"need rho2 < support - rstar ({support - rstar}), got {rho2}"
        )
    avail = support - rstar - rho2
    s = _SMOOTHSTEP_MAX_SLOPE
    # turnaround length a: peak = rho2 + a/2 must decay over (avail - a)
    # with slope magnitude <= bound:  s * peak <= bound * (avail - a)
    a_max = (_DECAY_SLOPE_BOUND * avail - s * rho2) / (_DECAY_SLOPE_BOUND + s / 2.0)
    if a_max <= 0:
        need = rstar + rho2 + s * rho2 / _DECAY_SLOPE_BOUND
        raise BumpConstructionError(
            f"support {support} too small for a decay with slope > -{_DECAY_SLOPE_BOUND}; "
            f"need support > {need:.4g}"
        )
    a = min(rho1, a_max) / 2.0
    peak = rho2 + a / 2.0

    x0, x1, x2 = rstar, rstar + rho1, rstar + rho2
    x3 = x2 + a
    L = support - x3

    r1 = rho1
    rise = [0.0, 0.0, 0.0, 10.0 / r1**2, -15.0 / r1**3, 6.0 / r1**4]
    # d * smoothstep(d / rho1), d = rho - rstar
    linear = [rho1, 1.0]
    # rho2 + d - a*S(d/a), S = integral of smoothstep; slope falls 1 -> 0
    turn = [rho2, 1.0, 0.0, 0.0, -2.5 / a**3, 3.0 / a**4, -1.0 / a**5]
    decay = [peak, 0.0, 0.0, -10.0 * peak / L**3, 15.0 * peak / L**4, -6.0 * peak / L**5]

    breaks = np.array([0.0, x0, x1, x2, x3, support])
    coeffs = ([0.0], rise, linear, turn, decay, [0.0])
    rho = np.linspace(0.0, support * 1.05, samples)
    bump = RadialBump(rstar, rho1, rho2, support, breaks, coeffs, 0.0)
    slopes = bump.chi_prime(rho)
    min_slope = float(np.min(slopes))
    bump = RadialBump(rstar, rho1, rho2, support, breaks, coeffs, min_slope)

    chi = bump.chi(rho)
    if min_slope <= -1.0:
        raise BumpConstructionError(f"sampled slope {min_slope} violates > -1")
    if np.any(chi[rho <= rstar] != 0.0):
        raise BumpConstructionError("profile not exactly zero below rstar")
    lin = (rho >= x1) & (rho <= x2)
    if np.max(np.abs(chi[lin] - (rho[lin] - rstar))) > 1e-12 * max(1.0, rho2):
        raise BumpConstructionError("linear section not exact")
    if np.any(np.abs(chi[rho >= support]) > 0):
        raise BumpConstructionError("profile not compactly supported")
    return bump


def radial_diffeo(
    chi: RadialBump,
    c: float = 1.0,
    samples: int = 4096,
    center=None,
    period: float = None,
) -> MorphismSpec:
    """Radial map ``x -> (|x| + chi(|x|)) x / |x|`` packaged as a morphism.

    Invertibility holds because ``rho + chi(rho)`` is strictly increasing
    (slope > -1 was validated); the inverse profile is solved by bisection
    plus Newton polishing.  ``c_max`` is 1 over the sampled sup of |Df|
    with a 1e-6 shave so the cone condition holds with headroom.

    With `center`/`period` the map acts on wrapped displacements about the
    centre; since it is the identity beyond the support this is a genuine
    torus diffeomorphism whenever ``support < period / 2``.
    """
    if chi.min_slope <= -1.0:
        raise BumpConstructionError("profile slope <= -1; radial map not invertible")
    sup = chi.support
    c0 = None if center is None else np.asarray(center, dtype=float)
    if c0 is not None and period is not None and sup >= period / 2:
        raise BumpConstructionError("support must stay below half the period")

    def to_disp(x):
        x = np.asarray(x, dtype=float)
        if c0 is None:
            return x
        d = x - c0
        if period is not None:
            d = d - period * np.round(d / period)
        return d

    def from_disp(w):
        return w if c0 is None else c0 + w

    def g(rho):
        return rho + chi.chi(rho)

    def gprime(rho):
        return 1.0 + chi.chi_prime(rho)

    def ginv(s):
        s = np.asarray(s, dtype=float)
        out = np.where(s >= sup, s, 0.0)
        todo = s < sup
        if np.any(todo):
            lo = np.zeros(np.count_nonzero(todo))
            hi = np.full_like(lo, sup)
            target = s[todo]
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                too_low = g(mid) < target
                lo = np.where(too_low, mid, lo)
                hi = np.where(too_low, hi, mid)
            root = 0.5 * (lo + hi)
            for _ in range(3):
                root = root - (g(root) - target) / gprime(root)
                root = np.clip(root, 0.0, sup)
            out[todo] = root
        return out

    def f(x):
        w = to_disp(x)
        rho = np.sqrt(np.sum(w * w, axis=-1))
        fac = np.where(rho > 0, (rho + chi.chi(rho)) / np.maximum(rho, 1e-300), 1.0)
        return from_disp(w * fac[..., None])

    def finv(y):
        w = to_disp(y)
        rho = np.sqrt(np.sum(w * w, axis=-1))
        r0 = ginv(rho)
        fac = np.where(rho > 0, r0 / np.maximum(rho, 1e-300), 1.0)
        return from_disp(w * fac[..., None])

    def _radial_jac(x, radial_scale, tangential_scale):
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        rho = np.sqrt(np.sum(x * x, axis=-1))
        safe = np.maximum(rho, 1e-300)
        unit = x / safe[..., None]
        P_r = unit[..., :, None] * unit[..., None, :]
        eye = np.broadcast_to(np.eye(d), P_r.shape)
        rad = np.where(rho > 0, radial_scale(rho), radial_scale(np.zeros_like(rho)))
        tan = np.where(rho > 0, tangential_scale(rho), rad)
        return rad[..., None, None] * P_r + tan[..., None, None] * (eye - P_r)

    def df(x):
        return _radial_jac(
            to_disp(x),
            lambda r: gprime(r),
            lambda r: g(r) / np.maximum(r, 1e-300),
        )

    def dfinv(y):
        w = to_disp(y)
        rho = np.sqrt(np.sum(w * w, axis=-1))
        r0 = ginv(rho)

        def rad(_):
            return 1.0 / gprime(r0)

        def tan(_):
            return np.where(rho > 0, r0 / np.maximum(rho, 1e-300), 1.0 / gprime(r0))

        return _radial_jac(w, rad, tan)

    rho_s = np.linspace(0.0, sup, samples)
    sup_push = float(np.max(np.maximum(np.abs(gprime(rho_s)), g(rho_s) / np.maximum(rho_s, 1e-12))))
    sup_push = max(sup_push, 1.0)
    c_max = (1.0 - 1e-6) / sup_push

    # spot-check that balls map to balls of the shifted radius
    dim = 2 if c0 is None else len(c0)
    for r in np.linspace(0.1 * sup, 0.95 * sup, 7):
        e = np.zeros(dim)
        e[0] = r
        got = float(np.sqrt(np.sum(to_disp(f(from_disp(e))) ** 2)))
        if abs(got - (r + chi.chi(r))) > 1e-10 * max(1.0, r):
            raise BumpConstructionError("radial map does not shift ball radii as built")

    return MorphismSpec(
        kind="scaled-diffeo",
        c=c,
        f=f,
        finv=finv,
        df=df,
        dfinv=dfinv,
        c_max=c_max,
        name=f"radial-bump(rstar={chi.rstar})",
    )


# ---------------------------------------------------------------------------
# inflationary metric
# ---------------------------------------------------------------------------


def inflation_profile(tstar: float):
    """C^2 step: 1 for t <= 0, 0 for t >= tstar."""
    if tstar <= 0:
        raise ValueError("tstar must be positive")
    from .deform import smoothstep

    def phi(t):
        return 1.0 - float(smoothstep(np.asarray(t) / tstar))

    phi.tstar = tstar
    return phi


def distal_metric(
    grid: SpatialGrid,
    f: MorphismSpec,
    phi,
    c: float,
    validate_samples: int = 2048,
) -> "geometry.StandardSpacetime":
    """Spacetime that inflates the geometry of ``f`` away over [0, tstar].

    beta = c^(2 phi(t)); the optical form is ``phi * h / c^2 + (1-phi) * id``
    with ``h(y) w = |Df^-1(y) w|^2``.  Requires ``c * |Df u| <= |u|`` at the
    sampled cells, which is exactly positive-semidefiniteness of
    (optical form - identity), i.e. cones never open past the flat ones.
    """
    from . import geometry
    from .errors import InvalidMetricError

    if callable(phi):
        profile = phi
    else:
        profile = inflation_profile(float(phi))
    if f.kind != "scaled-diffeo":
        raise ValueError("distal metric needs a scaled-diffeo morphism")

    pts = grid.points().reshape(-1, grid.dim)
    idx = np.linspace(0, len(pts) - 1, min(validate_samples, len(pts))).astype(int)
    push = float(np.max(linalg.spectral_norm(f.df(pts[idx]))))
    if c * push > 1.0 + 1e-9:
        raise InvalidMetricError(
            f"scale c={c} too large: c * |Df| reaches {c * push:.6g} > 1"
        )

    d = grid.dim
    eye = np.eye(d)

    def beta(t, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], float(c) ** (2.0 * profile(t)))

    def h_pullback(x):
        J = f.dfinv(np.asarray(x, dtype=float))
        return np.einsum("...ji,...jk->...ik", J, J)

    def hmetric(t, x):
        x = np.asarray(x, dtype=float)
        p = profile(t)
        k = (p / c**2) * h_pullback(x) + (1.0 - p) * eye
        return (float(c) ** (2.0 * p)) * k

    return geometry.StandardSpacetime(
        grid, beta, hmetric, name=f"distal(c={c})", time_dependent=True
    )


def cone_certificate(
    grid: SpatialGrid, f: MorphismSpec, phi, c: float, samples: int = 10_000, seed: int = 0
) -> dict:
    """Sampled min eigenvalue of (optical form - identity) for the distal
    metric; >= -tol certifies the flat cones contain the inflating ones."""
    from . import geometry

    M = distal_metric(grid, f, phi, c)
    rng = np.random.default_rng(seed)
    tstar = getattr(phi, "tstar", None) or (phi if not callable(phi) else 1.0)
    worst = math.inf
    n = 0
    eye = np.eye(grid.dim)
    while n < samples:
        batch = min(2048, samples - n)
        t = rng.uniform(-0.5 * tstar, 1.5 * tstar)
        x = rng.uniform(0, grid.period, size=(batch, grid.dim))
        kg = geometry.optical_metric(M, t, x)
        worst = min(worst, float(np.min(linalg.min_eig(kg - eye))))
        n += batch
    return {"min_eig_kg_minus_identity": worst, "samples": samples, "c": c, "seed": seed}


# ---------------------------------------------------------------------------
# distance model and rules
# ---------------------------------------------------------------------------


@dataclass
class DistanceModel:
    """Tabulated upper bounds dbar(r) on splitting distances of balls."""

    radii: np.ndarray
    dbar: np.ndarray
    log: list = field(default_factory=list)

    @classmethod
    def with_seed(cls, radii, seeds: dict):
        radii = np.asarray(sorted(float(r) for r in radii))
        dbar = np.full(len(radii), math.inf)
        model = cls(radii, dbar)
        for r, v in seeds.items():
            model.set_bound(float(r), float(v), rule="seed")
        return model

    def _index(self, r: float) -> int:
        i = int(np.argmin(np.abs(self.radii - r)))
        if abs(self.radii[i] - r) > 1e-9 * max(1.0, abs(r)):
            raise KeyError(f"radius {r} not on the model grid")
        return i

    def bound_at(self, r: float) -> float:
        """Valid upper bound for d(B(r)) from the grid: entries at larger
        radii transfer down at unit cost per unit radius."""
        above = self.radii >= r - 1e-12
        if not np.any(above):
            return math.inf
        return float(np.min(self.dbar[above] + (self.radii[above] - r)))

    def upper_dplus(self, r: float) -> float:
        """Upper bound for the limit-inferior dilation bound d+(B(r))."""
        return min(self.bound_at(r + e) for e in EPS_DILATION_GRID)

    def bound_at_extended(self, r: float) -> float:
        """bound_at, additionally routing through the scale rule so radii
        above the top grid entry still get a finite (if crude) bound."""
        best = self.bound_at(r)
        for s, v in zip(self.radii, self.dbar):
            if math.isfinite(v) and s < r:
                best = min(best, (r / float(s)) * self.upper_dplus(float(s)))
        return best

    def set_bound(self, r: float, value: float, rule: str, **info):
        i = self._index(r)
        old = float(self.dbar[i])
        new = min(old, float(value))
        self.dbar[i] = new
        self.log.append(
            {"rule": rule, "radius": float(self.radii[i]), "old": old, "new": new, **info}
        )
        return new

    def as_dict(self):
        return {
            "radii": [float(r) for r in self.radii],
            "dbar": [None if math.isinf(v) else float(v) for v in self.dbar],
        }


def apply_ball_dilation(model: DistanceModel):
    """Propagate bounds down the radius grid: each radius inherits any
    larger radius' bound plus the gap."""
    for i in range(len(model.radii)):
        b = model.bound_at(float(model.radii[i]))
        if b < model.dbar[i]:
            model.set_bound(float(model.radii[i]), b, rule="ball-dilation")
    return model


def apply_easydistal(model: DistanceModel, S_diam: float) -> float:
    """Bound for an arbitrary set of the given diameter:
    inf over tabulated R > diam of (R + dbar(R))."""
    above = model.radii > S_diam
    if not np.any(above):
        bound = math.inf
    else:
        bound = float(np.min(model.radii[above] + model.dbar[above]))
    model.log.append({"rule": "easydistal", "diam": S_diam, "bound": _json_inf(bound)})
    return bound


def easydistal_step(dilation_bound: float, r: float) -> float:
    """Single-step form: a bound for the r-dilation gives one for the set."""
    return dilation_bound + r


def apply_scaling(model: DistanceModel, target_radius: float, source_radius: float) -> float:
    """Scale rule between tabulated balls: bound(target) <= (target/source) * d+(source)."""
    lam = target_radius / source_radius
    if lam <= 0:
        raise ValueError("radii must be positive")
    val = lam * model.upper_dplus(source_radius)
    return model.set_bound(target_radius, val, rule="scaling", source=source_radius, lam=lam)


def apply_scaling_fill(model: DistanceModel):
    """Apply the scale rule from every finite entry to every radius."""
    finite = [float(r) for r, v in zip(model.radii, model.dbar) if math.isfinite(v)]
    for target in model.radii:
        for source in finite:
            if abs(target - source) < 1e-12:
                continue
            val = (target / source) * model.upper_dplus(source)
            if val < model.dbar[model._index(float(target))]:
                model.set_bound(float(target), val, rule="scaling", source=source)
    return model


@dataclass(frozen=True)
class DiffeoBound:
    rho_bound: float
    kappa: float
    kappa_bound: float

    def best(self):
        return min(self.rho_bound, self.kappa_bound)


def apply_diffeo_bound(
    model: DistanceModel,
    f: MorphismSpec,
    S: Region,
    eps: float,
    r: float,
    fS_radius: Optional[float] = None,
    update_radius: Optional[float] = None,
) -> DiffeoBound:
    """Push a set through a diffeomorphism and read a bound back.

    Geometric route: rho_bound is the smallest dilation of S containing the
    preimage of ball(f(S), r + 2 eps), from rasterised fields.  Norm route:
    kappa_bound = kappa * d+(f(S)) with kappa the sampled sup of |D(f^-1)|
    over ball(f(S), r) minus f(S).  Precondition: r must exceed the model's
    current bound for d(ball(f(S), eps)).
    """
    if fS_radius is not None:
        pre = model.bound_at(fS_radius + eps)
    else:
        fS_tmp = warp_region_euclid(S, f)
        pre = apply_easydistal(model, diameter(fS_tmp) + 2 * eps)
    if not r > pre:
        raise InclusionChainError(
            f"need r > current bound {pre:.6g} for the dilated image, got r={r}"
        )

    fS = warp_region_euclid(S, f)
    BfS = dilate(fS, r + 2 * eps)
    pre_region = preimage_region(BfS, f)
    if not pre_region.exterior_nonempty(2.0):
        raise InclusionChainError("preimage escapes the grid (covers the torus)")
    S_eu = S if S.units == "euclidean" else redistance(S)
    mask = pre_region.sdf >= 0
    rho_bound = float(np.max(np.maximum(-S_eu.sdf[mask], 0.0)))

    band = dilate(fS, r)
    cells = (band.sdf >= 0) & (fS.sdf <= 0)
    pts = S.grid.points()[cells]
    kappa = float(np.max(linalg.spectral_norm(f.dfinv(pts)))) if len(pts) else 1.0
    if fS_radius is not None:
        dplus = model.upper_dplus(fS_radius)
    else:
        dplus = min(apply_easydistal(model, diameter(fS) + 2 * e) for e in EPS_DILATION_GRID)
    kappa_bound = kappa * dplus

    out = DiffeoBound(rho_bound, kappa, kappa_bound)
    model.log.append(
        {
            "rule": "diffeo",
            "eps": eps,
            "r": r,
            "rho_bound": _json_inf(out.rho_bound),
            "kappa": kappa,
            "kappa_bound": _json_inf(kappa_bound),
        }
    )
    if update_radius is not None:
        model.set_bound(update_radius, out.best(), rule="diffeo-update")
    return out


def warp_region_euclid(S: Region, f: MorphismSpec) -> Region:
    """Image f(S) rasterised on S's grid and redistanced."""
    from .pairs import warp_region

    return warp_region(S, f.finv)


def preimage_region(R: Region, f: MorphismSpec) -> Region:
    from .pairs import warp_region

    return warp_region(R, f.f)


def _pow2_term(value: float, k: int) -> float:
    """``value / 2^(2^k)`` without overflow; underflow rounds up to the
    smallest positive float so results stay valid upper bounds."""
    if value == 0.0:
        return 0.0
    if math.isinf(value):
        return value
    if k > 11:
        return 5e-324
    out = math.ldexp(value, -(1 << k))
    return out if out > 0.0 else 5e-324


def bisection_refine(model: DistanceModel, r: float, eps: float, k: int) -> float:
    """One k-fold bisection application at radius r with dilation eps."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    base = model.bound_at_extended(r + eps)
    if math.isinf(base):
        raise InclusionChainError(f"no finite bound available at radius {r + eps}")
    shrink = _pow2_term(base, k)
    tail = (1.0 - _pow2_term(1.0, k)) * eps / math.ldexp(1.0, k - 1)
    val = shrink + tail
    return model.set_bound(r, val, rule="bisect", eps=eps, k=k, base=base)


def bisection_iterate(
    model: DistanceModel,
    r: float,
    k: int,
    target: float,
    eps0: Optional[float] = None,
    max_iter: int = 40,
) -> int:
    """Re-apply the bisection rule with a halving eps schedule until the
    bound at r falls below target; returns iterations used."""
    if eps0 is None:
        above = model.radii[model.radii > r + 1e-12]
        eps0 = float(above[0] - r) if len(above) else 0.1
    eps = eps0
    i = model._index(r)
    for it in range(1, max_iter + 1):
        bisection_refine(model, r, eps, k)
        if model.dbar[i] < target:
            return it
        eps /= 2.0
    return max_iter


def drive_all_below(model: DistanceModel, target: float, k: int = 5, max_iter: int = 60) -> bool:
    """Limit demonstration: propagate, scale to fill the grid, then bisect
    each radius until every tabulated bound is below target."""
    apply_ball_dilation(model)
    apply_scaling_fill(model)
    apply_ball_dilation(model)
    ok = True
    for r in model.radii:
        i = model._index(float(r))
        if math.isinf(model.dbar[i]):
            ok = False
            continue
        bisection_iterate(model, float(r), k, target, max_iter=max_iter)
        ok = ok and model.dbar[i] < target
    return ok


def _json_inf(v):
    return None if math.isinf(v) else v
