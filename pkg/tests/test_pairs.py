import math

import numpy as np
import pytest

import causalkit as ck
from causalkit import pairs as pr
from causalkit.errors import DegenerateBallError, InclusionChainError, TransportError

C = [6.0, 6.0]


def pair(grid, t, r_in, r_out, center=C):
    return ck.CauchyPair(t, ck.ball(grid, center, r_in), ck.ball(grid, center, r_out))


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------


def test_regular_cases():
    g = ck.SpatialGrid(2, 96, 10.0)
    c = [5.0, 5.0]
    assert ck.is_regular(pair(g, 0.0, 1.0, 2.0, c))
    bad = ck.is_regular(pair(g, 0.0, 2.0, 1.0, c))
    assert not bad and bad.reason == "S-not-inside-T"
    whole = ck.CauchyPair(0.0, ck.ball(g, c, 1.0), ck.ball(g, c, 9.0))
    res = ck.is_regular(whole)
    assert not res and res.reason == "T-exterior-empty"
    empty = ck.CauchyPair(0.0, ck.ball(g, c, -1.0), ck.ball(g, c, 2.0))
    assert ck.is_regular(empty).reason == "S-empty"


# ---------------------------------------------------------------------------
# preorder
# ---------------------------------------------------------------------------


def test_precedes_examples(grid96_12):
    g = grid96_12
    M = ck.minkowski(g)
    assert ck.precedes(pair(g, 0.0, 2.0, 3.0), pair(g, 0.5, 1.0, 4.0), M)
    p = pair(g, 0.0, 1.0, 2.0)
    assert ck.precedes(p, p, M)
    assert not ck.precedes(pair(g, 0.0, 1.0, 4.0), pair(g, 0.0, 3.0, 3.5), M)


def test_preorder_transitivity_on_random_triples():
    g = ck.SpatialGrid(2, 64, 12.0)
    M = ck.minkowski(g)
    rng = np.random.default_rng(20)
    for _ in range(50):
        r1 = rng.uniform(1.6, 2.2)
        R1 = rng.uniform(3.4, 4.0)
        dt12 = rng.uniform(0.1, 0.4)
        dt23 = rng.uniform(0.1, 0.4)
        slack = 4 * g.spacing
        p1 = pair(g, 0.0, r1, R1)
        p2 = pair(g, dt12, r1 - dt12 - slack, R1 + dt12 + slack)
        p3 = pair(g, dt12 + dt23, r1 - dt12 - dt23 - 2 * slack, R1 + dt12 + dt23 + 2 * slack)
        assert ck.precedes(p1, p2, M, ck.Margin(2.0))
        assert ck.precedes(p2, p3, M, ck.Margin(2.0))
        assert ck.precedes(p1, p3, M, ck.Margin(0.0))


def test_preorder_implies_development_nesting(grid96_12):
    g = grid96_12
    M = ck.minkowski(g)
    p1 = pair(g, 0.0, 2.0, 3.0)
    p2 = pair(g, 0.5, 1.0, 4.0)
    assert ck.precedes(p1, p2, M)
    D1 = ck.develop(M, p1.t, p1.S, (0.0, 0.5))
    D2 = ck.develop(M, p2.t, p2.S, (0.0, 0.5))
    for t in (0.1, 0.3, 0.5):
        if D2.slice(t).interior_nonempty():
            assert ck.contains(D1.slice(t), D2.slice(t), ck.Margin(0.0))


# ---------------------------------------------------------------------------
# light-speed window
# ---------------------------------------------------------------------------


def test_lightspeed_ultrastatic_constant(grid96_12):
    M = ck.ultrastatic(grid96_12, 1.0)
    cert = ck.lightspeed_epsilon(M, ck.ball(grid96_12, C, 1.0), 0.5, 0.0)
    assert cert.K == pytest.approx(1.05, rel=1e-12)
    assert cert.eps == pytest.approx(0.5 / (2 * math.sqrt(1.05)), rel=1e-12)


def test_lightspeed_expanding_metric(grid96_12):
    M = ck.from_expressions(grid96_12, "1", "exp(-2*t)")
    delta = 0.5
    cert = ck.lightspeed_epsilon(M, ck.ball(grid96_12, C, 1.0), delta, 0.0)
    K_oracle = 1.05 * math.exp(2 * delta)  # sup of the eigenvalue ratio
    assert cert.K == pytest.approx(K_oracle, rel=0.01)
    assert cert.eps == pytest.approx(delta / (2 * math.sqrt(K_oracle)), rel=0.01)


def test_lightspeed_literal_interval_differs(grid96_12):
    # shrinking optical form: the sup lives at negative offsets only
    M = ck.from_expressions(grid96_12, "1", "exp(2*t)")
    cert = ck.lightspeed_epsilon(M, ck.ball(grid96_12, C, 1.0), 0.5, 0.0)
    assert cert.K == pytest.approx(1.05 * math.e, rel=0.01)
    assert cert.K_literal == pytest.approx(1.05, rel=1e-9)


def test_lightspeed_degenerate_delta(grid96_12):
    M = ck.minkowski(grid96_12)
    with pytest.raises(DegenerateBallError):
        ck.lightspeed_epsilon(M, ck.ball(grid96_12, C, 1.0), 0.0, 0.0)


def test_lightspeed_ball_needs_exterior():
    g = ck.SpatialGrid(2, 64, 8.0)
    M = ck.minkowski(g)
    with pytest.raises(DegenerateBallError):
        ck.lightspeed_epsilon(M, ck.ball(g, [4.0, 4.0], 3.0), 3.0, 0.0)


def test_verify_lightspeed_minkowski(grid128):
    M = ck.minkowski(grid128)
    rep = ck.verify_lightspeed(M, ck.ball(grid128, [4.0, 4.0], 1.0), 0.5, 0.0, samples=8, seed=1)
    assert rep.passed
    assert rep.worst_margin >= 0.0
    assert len(rep.checks) == 8


@pytest.mark.parametrize(
    "kind",
    ["minkowski", "ultrastatic", "expanding", "contracting"],
)
def test_verify_lightspeed_suite_never_fails_at_margin_2(kind, grid256):
    """With the safety factor in eps, the window check holds at margin 2
    across the standard metric suite on the fine grid."""
    g = grid256
    M = {
        "minkowski": lambda: ck.minkowski(g),
        "ultrastatic": lambda: ck.ultrastatic(g, 4.0),
        "expanding": lambda: ck.from_expressions(g, "1", "exp(-2*t)"),
        "contracting": lambda: ck.from_expressions(g, "1", "exp(2*t)"),
    }[kind]()
    rep = ck.verify_lightspeed(M, ck.ball(g, [4.0, 4.0], 1.0), 0.5, 0.0, samples=6, seed=3)
    assert rep.passed
    assert rep.worst_margin >= -2.0


def test_window_sharpness_outside(grid128):
    """Far enough outside the certified window the containment fails."""
    M = ck.minkowski(grid128)
    T = ck.ball(grid128, [4.0, 4.0], 1.0)
    B = ck.optical_ball(M, 0.0, T, 0.5)
    D = ck.develop(M, -0.35, B, (-0.35, 0.35))
    assert not ck.slice_contained(D, 0.35, T, ck.Margin(2.0))


# ---------------------------------------------------------------------------
# ordered pairs from nested chains
# ---------------------------------------------------------------------------


def test_step_pairs_minkowski(grid96_12):
    g = grid96_12
    M = ck.minkowski(g)
    chain = tuple(ck.ball(g, C, r) for r in (0.5, 1.0, 2.0, 3.0))
    cert = ck.step_pairs(M, chain, 0.0, validate=2)
    assert cert.delta == pytest.approx(0.5, abs=2 * g.spacing)
    assert cert.eps == pytest.approx(cert.delta / (2 * math.sqrt(1.05)), rel=1e-9)
    assert all(c["ok"] for c in cert.checks)


def test_step_pairs_zero_gap(grid96_12):
    g = grid96_12
    M = ck.minkowski(g)
    b = ck.ball(g, C, 1.0)
    with pytest.raises(InclusionChainError):
        ck.step_pairs(M, (b, b, ck.ball(g, C, 2.0), ck.ball(g, C, 3.0)), 0.0)


def test_step_pairs_optical_units(grid96_12):
    g = grid96_12
    M = ck.ultrastatic(g, 4.0)  # optical distances double the Euclidean ones
    chain = tuple(ck.ball(g, C, r) for r in (0.5, 1.0, 2.0, 3.0))
    cert = ck.step_pairs(M, chain, 0.0, validate=0)
    assert cert.delta == pytest.approx(1.0, abs=4 * g.spacing)


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------


def test_transport_slab_identity(grid96_12):
    p = pair(grid96_12, 0.2, 1.0, 2.0)
    spec = ck.slab_inclusion(-1.0, 1.0)
    assert ck.transport_pair(spec, p, "forward") is p
    with pytest.raises(TransportError):
        ck.transport_pair(spec, ck.CauchyPair(3.0, p.S, p.T), "forward")


def test_transport_linear_map(grid96_12):
    g = grid96_12
    f = ck.linear_map(2.0, c=2.0, center=C, period=g.period)
    p = pair(g, -0.2, 1.0, 2.0)
    out = ck.transport_pair(f, p, "forward")
    assert out.t == pytest.approx(-0.1)
    assert ck.hausdorff(out.S, ck.ball(g, C, 0.5)) <= 2 * g.spacing
    assert ck.hausdorff(out.T, ck.ball(g, C, 1.0)) <= 2 * g.spacing
    back = ck.transport_pair(f, out, "inverse")
    assert back.t == pytest.approx(-0.2)
    assert ck.hausdorff(back.S, p.S) <= 2 * g.spacing
    assert ck.hausdorff(back.T, p.T) <= 2 * g.spacing


def test_transport_radial_bump(grid96_12):
    g = grid96_12
    bump = ck.build_radial_bump(1.0, 0.3, 0.8, 4.5)
    f = ck.radial_diffeo(bump, center=C, period=g.period)
    p = pair(g, 0.0, 0.8, 3.8)
    out = ck.transport_pair(f, p, "forward")
    assert ck.is_regular(out)
    # inner ball below rstar is fixed; outer radius shifts by chi
    assert ck.hausdorff(out.S, p.S) <= 2 * g.spacing
    want_T = ck.ball(g, C, 3.8 + bump.chi(3.8))
    assert ck.hausdorff(out.T, want_T) <= 2 * g.spacing
    back = ck.transport_pair(f, out, "inverse")
    assert ck.hausdorff(back.S, p.S) <= 2 * g.spacing
    assert ck.hausdorff(back.T, p.T) <= 2 * g.spacing


def test_transport_rejects_irregular_image(grid96_12):
    g = grid96_12
    f = ck.linear_map(0.2, center=C, period=g.period)  # 5x expansion
    p = pair(g, 0.0, 1.0, 2.0)  # image T radius 10 exhausts the torus
    with pytest.raises(TransportError):
        ck.transport_pair(f, p, "forward")


def test_scaling_margin(grid96_12):
    pts = np.array([[1.0, 0.0], [0.3, 0.4]])
    f = ck.linear_map(2.0, c=2.0)
    assert f.scaling_margin(pts) == pytest.approx(0.0, abs=1e-12)
    f_bad = ck.linear_map(2.0, c=2.5)
    assert f_bad.scaling_margin(pts) < 0
