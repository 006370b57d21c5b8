"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline.
Tolerances are fixed here, not tuned: containments at 2 cells, eigenvalue
certificates at 1e-10, endpoint equality at 1e-12 relative, bump checks at
1e-12 / -0.95, bound recursion values evaluated exactly.
"""
import math
import time

import numpy as np
import pytest

import causalkit as ck
from causalkit import distal
from causalkit.causal import develop


def _line(num, desc, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {num}: {desc}" + (f" ({detail})" if detail else ""))
    return ok


C8 = [4.0, 4.0]
C12 = [6.0, 6.0]


def test_criterion_1_minkowski_development_oracle():
    grid = ck.SpatialGrid(2, 256, 8.0)
    M = ck.minkowski(grid)
    U = ck.ball(grid, C8, 1.0)
    t0 = time.monotonic()
    D = develop(M, 0.0, U, (0.0, 0.5))
    err = ck.hausdorff(D.slice(0.5), ck.ball(grid, C8, 0.5))
    elapsed = time.monotonic() - t0
    ok = err <= 2 * grid.spacing and elapsed < 10.0
    assert _line(
        1,
        "flat-cone slice at t=0.5 matches ball 0.5",
        ok,
        f"hausdorff {err:.4f} <= {2 * grid.spacing:.4f}, {elapsed:.1f}s < 10s",
    )


def test_criterion_2_constant_optical_metric_oracle():
    grid = ck.SpatialGrid(2, 256, 8.0)
    M = ck.ultrastatic(grid, 4.0)  # optical speed 1 <=> coordinate speed 1/2
    U = ck.ball(grid, C8, 1.0)
    D = develop(M, 0.0, U, (0.0, 0.5))
    err = ck.hausdorff(D.slice(0.5), ck.ball(grid, C8, 0.75))
    ok = err <= 2 * grid.spacing
    assert _line(2, "slowed-cone slice at t=0.5 matches ball 0.75", ok, f"hausdorff {err:.4f}")


def test_criterion_3_lightspeed_certificate():
    grid = ck.SpatialGrid(2, 256, 8.0)
    M = ck.from_expressions(grid, "1", "exp(-2*t)")
    T = ck.ball(grid, C8, 1.0)
    delta, tstar = 0.5, 0.0
    cert = ck.lightspeed_epsilon(M, T, delta, tstar)
    # independent oracle: densely sampled sup of the generalized eigenvalues
    # of k(tstar) against k(tau) (computed with numpy's eigensolver)
    taus = np.linspace(tstar - delta, tstar + delta, 2001)
    sup = 1.0
    k0 = np.exp(-2.0 * tstar) * np.eye(2)
    for tau in taus:
        ktau = np.exp(-2.0 * tau) * np.eye(2)
        lam = np.max(np.linalg.eigvals(np.linalg.solve(ktau, k0)).real)
        sup = max(sup, lam)
    K_oracle = 1.05 * sup
    k_ok = abs(cert.K - K_oracle) / K_oracle <= 0.01
    eps_ok = cert.eps == pytest.approx(delta / (2 * math.sqrt(cert.K)), rel=1e-12)
    rep = ck.verify_lightspeed(M, T, delta, tstar, samples=20, seed=0)
    ok = k_ok and eps_ok and rep.passed and rep.worst_margin >= 0.0
    assert _line(
        3,
        "expanding-metric window certificate",
        ok,
        f"K {cert.K:.5f} vs oracle {K_oracle:.5f}, eps {cert.eps:.5f}, "
        f"worst margin {rep.worst_margin:.2f} cells over 20 samples",
    )


def test_criterion_4_interpolation_construction():
    grid = ck.SpatialGrid(2, 256, 8.0)
    M = ck.minkowski(grid)
    N = ck.ultrastatic(grid, 4.0)
    times = ck.InterpolationTimes(0.1, 0.2, 0.3, 0.4)
    g = ck.interpolate(M, N, times)
    rep = ck.verify_interpolation(
        g, M, N, times, samples=1250, endpoint_rtol=1e-12, cone_tol=1e-10, seed=0
    )
    ok = rep.passed and rep.failures == 0
    assert _line(
        4,
        "interpolated metric: endpoint equality and cone nesting at 10^4 samples",
        ok,
        f"worst endpoint rel {rep.worst_endpoint_rel:.2e}, "
        f"worst cone margins {rep.worst_cone_margin_1:.2e}/{rep.worst_cone_margin_2:.2e}",
    )


def test_criterion_5_theorem_chain_replay():
    grid = ck.SpatialGrid(2, 256, 12.0)
    M = ck.minkowski(grid)
    N = ck.ultrastatic(grid, 4.0)
    pair = ck.CauchyPair(0.0, ck.ball(grid, C12, 1.0), ck.ball(grid, C12, 2.0))
    t0 = time.monotonic()
    rep = ck.verify_theorem_chain(M, N, [pair], mode="both", margin=2.0)
    elapsed = time.monotonic() - t0
    margins = [min(c["s_margin"], c["t_margin"]) for c in rep.checks]
    ok = rep.passed and len(rep.checks) == 2 and elapsed < 120.0
    assert _line(
        5,
        "deformation chain replay (both orderings), four containments at margin 2",
        ok,
        f"margins {['%.2f' % m for m in margins]}, {elapsed:.1f}s < 120s",
    )


def test_criterion_6_inflation_metric_certificates():
    grid = ck.SpatialGrid(2, 64, 16.0)
    phi = ck.inflation_profile(1.0)
    lam = 2.0
    lin = ck.linear_map(lam)
    cert_lin = distal.cone_certificate(grid, lin, phi, 2.0, samples=10_000, seed=0)
    bump = ck.build_radial_bump(1.0, 0.5, 1.5, 6.0)
    fb = ck.radial_diffeo(bump, center=[8.0, 8.0], period=16.0)
    cert_bump = distal.cone_certificate(grid, fb, phi, fb.c_max, samples=10_000, seed=0)
    # kappa for linear maps is exact
    model = ck.DistanceModel.with_seed(np.arange(0.25, 6.1, 0.25), {})
    model.dbar[:] = 0.5
    out = ck.apply_diffeo_bound(
        model,
        ck.linear_map(lam, center=[8.0, 8.0], period=16.0),
        ck.ball(grid, [8.0, 8.0], 2.0),
        eps=0.1,
        r=1.0,
        fS_radius=1.0,
    )
    ok = (
        cert_lin["min_eig_kg_minus_identity"] >= -1e-10
        and cert_bump["min_eig_kg_minus_identity"] >= -1e-10
        and abs(out.kappa - lam) <= 1e-12
    )
    assert _line(
        6,
        "inflation metric cone certificates and exact linear kappa",
        ok,
        f"min eigs {cert_lin['min_eig_kg_minus_identity']:.2e}, "
        f"{cert_bump['min_eig_kg_minus_identity']:.2e}; |kappa-lam| {abs(out.kappa - lam):.1e}",
    )


def test_criterion_7_bisection_recursion():
    model = ck.DistanceModel.with_seed([1.0, 1.1], {1.1: 1.0})
    got = ck.bisection_refine(model, 1.0, 0.1, 5)
    formula = math.ldexp(1.0, -32) + (1.0 - math.ldexp(1.0, -32)) * 0.1 / 16.0
    direct_ok = got == pytest.approx(formula, rel=1e-14) and got <= 0.00626
    model2 = ck.DistanceModel.with_seed([1.0, 2.0], {1.0: 1.0, 2.0: 1.0})
    t0 = time.monotonic()
    iters = ck.bisection_iterate(model2, 1.0, 5, 1e-6, eps0=1.0, max_iter=25)
    elapsed = time.monotonic() - t0
    final = model2.bound_at(1.0)
    ok = direct_ok and final < 1e-6 and iters <= 25 and elapsed < 1.0
    assert _line(
        7,
        "bound recursion: direct value and scheduled iterator",
        ok,
        f"direct {got:.8f} <= 0.00626, iterator {final:.2e} in {iters} steps, {elapsed:.2f}s",
    )


def test_criterion_8_bump_constraints():
    bump = ck.build_radial_bump(1.0, 0.5, 1.5, 6.0)
    exact = abs(bump.chi(2.0) - 1.0)
    rho = np.linspace(0.0, 6.3, 10_000)
    min_slope = float(np.min(bump.chi_prime(rho)))
    ok = exact <= 1e-12 and min_slope >= -0.95
    assert _line(
        8,
        "bump profile: exact linear section and slope floor",
        ok,
        f"|chi(2)-1| {exact:.1e}, min slope {min_slope:.3f} >= -0.95",
    )


def test_criterion_9_property_suites():
    # (a) preorder transitivity on 50 random nested-ball triples
    g = ck.SpatialGrid(2, 64, 12.0)
    M = ck.minkowski(g)
    rng = np.random.default_rng(20)
    trans_ok = True
    for _ in range(50):
        r1 = rng.uniform(1.6, 2.2)
        R1 = rng.uniform(3.4, 4.0)
        dt12, dt23 = rng.uniform(0.1, 0.4, size=2)
        slack = 4 * g.spacing
        p1 = ck.CauchyPair(0.0, ck.ball(g, C12, r1), ck.ball(g, C12, R1))
        p2 = ck.CauchyPair(
            dt12, ck.ball(g, C12, r1 - dt12 - slack), ck.ball(g, C12, R1 + dt12 + slack)
        )
        p3 = ck.CauchyPair(
            dt12 + dt23,
            ck.ball(g, C12, r1 - dt12 - dt23 - 2 * slack),
            ck.ball(g, C12, R1 + dt12 + dt23 + 2 * slack),
        )
        if ck.precedes(p1, p2, M, ck.Margin(2.0)) and ck.precedes(p2, p3, M, ck.Margin(2.0)):
            trans_ok = trans_ok and bool(ck.precedes(p1, p3, M, ck.Margin(0.0)))
        else:  # construction guarantees the hypotheses; reaching here is a failure
            trans_ok = False

    # (b) development monotonicity on 20 random nested-region pairs
    g8 = ck.SpatialGrid(2, 64, 8.0)
    M8 = ck.minkowski(g8)
    mono_ok = True
    for _ in range(20):
        c = rng.uniform(2.5, 5.5, size=2)
        U = ck.ball(g8, c, rng.uniform(0.6, 1.2))
        V = ck.union_of([U, ck.ball(g8, rng.uniform(2, 6, size=2), rng.uniform(0.4, 1.0))])
        DU = develop(M8, 0.0, U, (0.0, 0.5))
        DV = develop(M8, 0.0, V, (0.0, 0.5))
        for t in (0.25, 0.5):
            if DU.slice(t).interior_nonempty():
                mono_ok = mono_ok and ck.contains(DV.slice(t), DU.slice(t), ck.Margin(0.0))

    # (c) ball semigroup: 10 cases within 3 cells for constant optical forms
    semi_ok = True
    metrics = [ck.minkowski(g8), ck.ultrastatic(g8, 4.0)]
    for i in range(10):
        Mm = metrics[i % 2]
        r0 = rng.uniform(0.5, 1.2)
        r1, r2 = rng.uniform(0.2, 0.6, size=2)
        U = ck.ball(g8, rng.uniform(3, 5, size=2), r0)
        two = ck.optical_ball(Mm, 0.0, ck.optical_ball(Mm, 0.0, U, r1), r2)
        one = ck.optical_ball(Mm, 0.0, U, r1 + r2)
        semi_ok = semi_ok and ck.contains(two, one, ck.Margin(2.0))
        semi_ok = semi_ok and ck.hausdorff(two, one) <= 3 * g8.spacing

    # (d) grid convergence: halving dx reduces the slice error by >= 1.5x
    errs = {}
    for cells in (128, 256):
        gg = ck.SpatialGrid(2, cells, 8.0)
        D = develop(ck.minkowski(gg), 0.0, ck.ball(gg, C8, 1.0), (0.0, 0.55))
        errs[cells] = ck.hausdorff(D.slice(0.5), ck.ball(gg, C8, 0.5))
    factor = errs[128] / errs[256]
    conv_ok = factor >= 1.5

    ok = trans_ok and mono_ok and semi_ok and conv_ok
    assert _line(
        9,
        "property suites: transitivity, monotonicity, semigroup, convergence",
        ok,
        f"transitivity {trans_ok}, monotonicity {mono_ok}, semigroup {semi_ok}, "
        f"convergence factor {factor:.2f}",
    )
