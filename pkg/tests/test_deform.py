import numpy as np
import pytest

import causalkit as ck
from causalkit import deform, geometry
from causalkit.errors import InclusionChainError

C = [6.0, 6.0]
TIMES = ck.InterpolationTimes(0.1, 0.2, 0.3, 0.4)


def test_times_ordering():
    with pytest.raises(ValueError):
        ck.InterpolationTimes(0.1, 0.3, 0.2, 0.4)


def test_endpoints_bit_identical(grid96_12):
    M = ck.minkowski(grid96_12)
    N = ck.ultrastatic(grid96_12, 4.0)
    g = ck.interpolate(M, N, TIMES)
    x = np.array([[6.0, 6.0], [2.0, 9.0]])
    for t in (-1.0, 0.05, 0.1):
        assert np.array_equal(g.beta(t, x), M.beta(t, x))
        assert np.array_equal(g.hmetric(t, x), M.hmetric(t, x))
    for t in (0.4, 0.7, 2.0):
        assert np.array_equal(g.beta(t, x), N.beta(t, x))
        assert np.array_equal(g.hmetric(t, x), N.hmetric(t, x))


def test_mid_slab_sum_of_optical_forms(grid96_12):
    M = ck.minkowski(grid96_12)
    N = ck.ultrastatic(grid96_12, 4.0)
    g = ck.interpolate(M, N, TIMES)
    x = np.array([[5.0, 5.0]])
    k = ck.optical_metric(g, 0.25, x)  # both plateaus active: k1 + k2
    assert np.allclose(k[0], 5.0 * np.eye(2), rtol=0, atol=1e-12)
    assert ck.cone_contained(g, M, 0.25, x)[0]
    assert ck.cone_contained(g, N, 0.25, x)[0]


def test_degenerate_interpolation(grid96_12):
    M = ck.minkowski(grid96_12)
    g = ck.interpolate(M, M, TIMES)
    rep = ck.verify_interpolation(g, M, M, TIMES, samples=100)
    assert rep.passed
    x = np.array([[4.0, 4.0]])
    k = ck.optical_metric(g, 0.25, x)
    assert np.allclose(k[0], 2.0 * np.eye(2))  # overlapping unit plateaus add


def test_verify_interpolation_passes(grid96_12):
    M = ck.minkowski(grid96_12)
    N = ck.ultrastatic(grid96_12, 4.0)
    g = ck.interpolate(M, N, TIMES)
    rep = ck.verify_interpolation(g, M, N, TIMES, samples=300, seed=5)
    assert rep.passed
    assert rep.worst_endpoint_rel == 0.0
    assert rep.worst_cone_margin_1 >= -1e-10
    assert rep.worst_cone_margin_2 >= -1e-10


def test_verify_interpolation_flags_bad_metric(grid96_12):
    M = ck.minkowski(grid96_12)
    N = ck.ultrastatic(grid96_12, 4.0)

    def bad_h(t, x):
        x = np.asarray(x, dtype=float)
        w = 0.5 if TIMES.t1 < t < TIMES.t2 else 1.0
        return np.broadcast_to(w * np.eye(2), x.shape[:-1] + (2, 2)).copy()

    bad = geometry.StandardSpacetime(grid96_12.__class__(2, 96, 12.0), M.beta, bad_h)
    rep = ck.verify_interpolation(bad, M, N, TIMES, samples=200)
    assert not rep.passed
    assert rep.failures > 0


def test_cone_nesting_transfer(grid96_12):
    """On the early slab the interpolated metric's developments contain the
    first metric's: orderings certified there transfer."""
    M = ck.minkowski(grid96_12)
    N = ck.ultrastatic(grid96_12, 4.0)
    g = ck.interpolate(M, N, TIMES)
    U = ck.ball(grid96_12, C, 1.5)
    DM = ck.develop(M, 0.0, U, (0.0, TIMES.t2p))
    DI = ck.develop(g, 0.0, U, (0.0, TIMES.t2p))
    for t in (0.1, 0.2, 0.29):
        assert ck.contains(DI.slice(t), DM.slice(t), ck.Margin(0.0))
    # and at the preorder level: an ordering certified in the first metric
    # with both times on the early slab holds in the interpolated one
    p1 = ck.CauchyPair(0.05, ck.ball(grid96_12, C, 2.0), ck.ball(grid96_12, C, 3.0))
    p2 = ck.CauchyPair(0.25, ck.ball(grid96_12, C, 1.5), ck.ball(grid96_12, C, 3.5))
    assert ck.precedes(p1, p2, M, ck.Margin(2.0))
    assert ck.precedes(p1, p2, g, ck.Margin(2.0))


@pytest.fixture(scope="module")
def chain_setup():
    g = ck.SpatialGrid(2, 96, 12.0)
    M = ck.minkowski(g)
    N = ck.ultrastatic(g, 4.0)
    p = ck.CauchyPair(0.0, ck.ball(g, C, 1.0), ck.ball(g, C, 2.0))
    return g, M, N, p


def test_chain_split_mode(chain_setup):
    g, M, N, p = chain_setup
    rep = ck.verify_theorem_chain(M, N, [p], mode="split")
    assert rep.passed
    assert len(rep.checks) == 1
    assert rep.checks[0]["ordering"] == "far-precedes-input"
    assert rep.t_star < rep.t_far
    t = rep.times
    assert 0.0 < t.t1 < t.t1p < rep.t_star < t.t2p < t.t2 < rep.t_far


def test_chain_rs_mode(chain_setup):
    g, M, N, p = chain_setup
    rep = ck.verify_theorem_chain(M, N, [p], mode="rs")
    assert rep.passed
    assert rep.checks[0]["ordering"] == "input-precedes-far"


def test_chain_both_mode_implies_singles(chain_setup):
    g, M, N, p = chain_setup
    rep = ck.verify_theorem_chain(M, N, [p], mode="both")
    assert rep.passed
    orderings = sorted(c["ordering"] for c in rep.checks)
    assert orderings == ["far-precedes-input", "input-precedes-far"]
    # and each single mode passes on the same inputs
    assert ck.verify_theorem_chain(M, N, [p], mode="split").passed
    assert ck.verify_theorem_chain(M, N, [p], mode="rs").passed


def test_chain_degenerate_same_metric(chain_setup):
    g, M, N, p = chain_setup
    rep = ck.verify_theorem_chain(M, M, [p], mode="both")
    assert rep.passed
    I = ck.interpolate(M, M, rep.times)
    x = np.array([[6.0, 6.0]])
    assert np.array_equal(I.hmetric(rep.times.t1 - 0.01, x), M.hmetric(rep.times.t1 - 0.01, x))
    assert np.array_equal(I.hmetric(rep.times.t2 + 0.01, x), M.hmetric(rep.times.t2 + 0.01, x))


def test_chain_multiple_pairs(chain_setup):
    g, M, N, p = chain_setup
    q = ck.CauchyPair(0.0, ck.ball(g, [3.0, 8.0], 0.6), ck.ball(g, [3.0, 8.0], 1.4))
    rep = ck.verify_theorem_chain(M, N, [p, q], mode="both")
    assert rep.passed
    assert len(rep.checks) == 4
    assert len(rep.per_pair) == 2


def test_chain_weak_distal(chain_setup):
    g, M, N, _ = chain_setup
    p = ck.CauchyPair(0.0, ck.ball(g, C, 1.0), ck.ball(g, C, 2.4))
    rep = ck.verify_theorem_chain(M, N, [p], mode="weak-distal")
    assert rep.passed
    assert len(rep.checks) == 4  # three step orderings + the composite
    names = [c["ordering"] for c in rep.checks]
    assert "far-precedes-input (interpolated)" in names


def test_chain_rejects_bad_pair(chain_setup):
    g, M, N, _ = chain_setup
    bad = ck.CauchyPair(0.0, ck.ball(g, C, 2.0), ck.ball(g, C, 1.0))
    with pytest.raises(InclusionChainError):
        ck.verify_theorem_chain(M, N, [bad], mode="split")


def test_chain_pairs_must_share_slice(chain_setup):
    g, M, N, p = chain_setup
    q = ck.CauchyPair(0.5, p.S, p.T)
    with pytest.raises(ValueError):
        ck.verify_theorem_chain(M, N, [p, q], mode="split")


def test_interpolation_chain_transport(grid96_12):
    from causalkit.errors import TransportError

    chain = deform.interpolation_chain(TIMES, grid96_12)
    p = ck.CauchyPair(0.05, ck.ball(grid96_12, C, 1.0), ck.ball(grid96_12, C, 2.0))
    # the past-slab arrows carry the pair untouched
    past = deform.CauchyChain(chain.entries[:2], grid96_12)
    assert past.transport(p) is p
    # crossing to the future slab needs development re-anchoring, not a point map
    with pytest.raises(TransportError):
        chain.transport(p)
