import numpy as np
import pytest

import causalkit as ck
from causalkit import regions
from causalkit.errors import (
    DegenerateBallError,
    EmptyRegionError,
    GridMismatchError,
)
from conftest import const_spacetime

C = [4.0, 4.0]


def test_contains_cases(grid64):
    b1 = ck.ball(grid64, C, 1.0)
    b2 = ck.ball(grid64, C, 2.0)
    assert ck.contains(b2, b1, ck.Margin(0.0))
    assert not ck.contains(b1, b2, ck.Margin(0.0))
    assert ck.contains(b1, b1, ck.Margin(2.0))


def test_margin_validation():
    with pytest.raises(ValueError):
        ck.Margin(-1.0)


def test_containment_margin_consistency(grid64):
    A = ck.ball(grid64, C, 2.0)
    B = ck.ball(grid64, C, 1.5)
    m = ck.containment_margin(A, B)
    assert m == pytest.approx(0.5 / grid64.spacing, abs=1.5)
    assert ck.contains(A, B, ck.Margin(0.0)) == (m >= 0)


def test_hausdorff_cases(grid64):
    dx = grid64.spacing
    b1 = ck.ball(grid64, C, 1.0)
    assert ck.hausdorff(b1, b1) == 0.0
    b15 = ck.ball(grid64, C, 1.5)
    assert abs(ck.hausdorff(b1, b15) - 0.5) <= 2 * dx
    dil = ck.dilate(b1, dx)
    assert ck.hausdorff(b1, dil) <= 2 * dx


def test_hausdorff_requires_nonempty(grid64):
    b = ck.ball(grid64, C, 1.0)
    empty = ck.ball(grid64, C, -1.0)
    with pytest.raises(EmptyRegionError):
        ck.hausdorff(b, empty)


def test_grid_mismatch(grid64, grid128):
    with pytest.raises(GridMismatchError):
        ck.contains(ck.ball(grid64, C, 1.0), ck.ball(grid128, C, 1.0), ck.Margin(0.0))


def test_optical_ball_minkowski(grid128, mink128):
    dx = grid128.spacing
    U = ck.ball(grid128, C, 1.0)
    B = ck.optical_ball(mink128, 0.0, U, 0.5)
    assert ck.hausdorff(B, ck.ball(grid128, C, 1.5)) <= 2 * dx


def test_optical_ball_ultrastatic(grid128):
    # constant k = 4 id: optical distance is twice the Euclidean one
    M = ck.ultrastatic(grid128, 4.0)
    U = ck.ball(grid128, C, 1.0)
    B = ck.optical_ball(M, 0.0, U, 1.0)
    assert ck.hausdorff(B, ck.ball(grid128, C, 1.5)) <= 2 * grid128.spacing


def test_optical_ball_zero_radius(grid128, mink128):
    U = ck.ball(grid128, C, 1.0)
    B = ck.optical_ball(mink128, 0.0, U, 0.0)
    assert ck.hausdorff(B, U) <= grid128.spacing


def test_optical_ball_errors(grid64, mink64):
    U = ck.ball(grid64, C, 1.0)
    with pytest.raises(DegenerateBallError):
        ck.optical_ball(mink64, 0.0, U, -0.1)
    with pytest.raises(EmptyRegionError):
        ck.optical_ball(mink64, 0.0, ck.ball(grid64, C, -0.5), 0.5)


def test_fast_marching_matches_metric_distance_closed_form():
    """Point-like seeds in constant metrics: distance is the metric norm of
    the wrapped displacement (straight geodesics on the flat torus)."""
    g = ck.SpatialGrid(2, 96, 8.0)
    rng = np.random.default_rng(2)
    mats = [
        np.eye(2),
        4.0 * np.eye(2),
        np.diag([4.0, 1.0]),
        np.array([[2.0, 0.5], [0.5, 1.0]]),
    ]
    for i in range(10):
        k = mats[i % len(mats)]
        center = rng.uniform(1, 7, size=2)
        M = const_spacetime(g, 1.0, k)
        seed = ck.ball(g, center, 1.5 * g.spacing)
        dist = ck.optical_distance(M, 0.0, seed)
        pts = g.points()
        d = g.wrap(pts - center)
        # geodesics are straight, but the shortest torus image in the metric
        # need not be the shortest Euclidean one: minimise over all images
        want = np.full(g.shape, np.inf)
        for di in (-1.0, 0.0, 1.0):
            for dj in (-1.0, 0.0, 1.0):
                dd = d + np.array([di, dj]) * g.period
                want = np.minimum(want, np.sqrt(np.einsum("...i,ij,...j->...", dd, k, dd)))
        err = np.abs(dist - want)[want > 4 * g.spacing]
        tol = (2.5 * g.spacing) * np.sqrt(np.max(np.linalg.eigvalsh(k)))
        assert float(np.max(err)) <= tol


def test_fast_marching_varying_cross_metric_bracketed():
    """A space-varying metric with cross terms sits between two constant
    bounds; the marched distances must respect the comparison ordering."""
    g = ck.SpatialGrid(2, 96, 8.0)
    center = np.array([4.0, 4.0])
    # k(x) = [[2, s(x)], [s(x), 1]] with s in [0.2, 0.8]
    M = ck.from_expressions(
        g, "1", [["2", "0.5 + 0.3*sin(x1)*cos(x2)"], ["0.5 + 0.3*sin(x1)*cos(x2)", "1"]]
    )
    seed = ck.ball(g, center, 1.5 * g.spacing)
    dist = ck.optical_distance(M, 0.0, seed)

    def const_dist(k):
        Mc = const_spacetime(g, 1.0, k)
        return ck.optical_distance(Mc, 0.0, seed)

    # larger metric -> larger distances; diagonal inflation by 0.3 dominates
    # the +-0.3 swing of the off-diagonal entry as a quadratic form
    lo = const_dist(np.array([[1.7, 0.5], [0.5, 0.7]]))
    hi = const_dist(np.array([[2.3, 0.5], [0.5, 1.3]]))
    slack = 3 * g.spacing * 2.0
    far = lo > 4 * g.spacing
    assert np.all(dist[far] >= lo[far] - slack)
    assert np.all(dist[far] <= hi[far] + slack)


def test_ball_semigroup_constant_metric(grid64):
    """Dilating twice equals dilating by the sum, within 3 cells, and the
    sum-ball is always contained at margin 2."""
    rng = np.random.default_rng(4)
    metrics = [ck.minkowski(grid64), ck.ultrastatic(grid64, 4.0)]
    for i in range(10):
        M = metrics[i % 2]
        r0 = rng.uniform(0.5, 1.2)
        r1, r2 = rng.uniform(0.2, 0.6, size=2)
        center = rng.uniform(2, 6, size=2)
        U = ck.ball(grid64, center, r0)
        two = ck.optical_ball(M, 0.0, ck.optical_ball(M, 0.0, U, r1), r2)
        one = ck.optical_ball(M, 0.0, U, r1 + r2)
        assert ck.contains(two, one, ck.Margin(2.0))
        assert ck.hausdorff(two, one) <= 3 * grid64.spacing


def test_ball_semigroup_varying_metric(grid64):
    M = ck.from_expressions(grid64, "1", "1.5 + 0.5*sin(x1)*cos(x2)")
    U = ck.ball(grid64, C, 1.0)
    two = ck.optical_ball(M, 0.0, ck.optical_ball(M, 0.0, U, 0.4), 0.3)
    one = ck.optical_ball(M, 0.0, U, 0.7)
    assert ck.contains(two, one, ck.Margin(2.0))


def test_dilation_monotone(grid64, mink64):
    U = ck.ball(grid64, [3.0, 3.0], 0.8)
    V = ck.union_of([U, ck.ball(grid64, [5.5, 5.5], 1.0)])
    BU = ck.optical_ball(mink64, 0.0, U, 0.6)
    BV = ck.optical_ball(mink64, 0.0, V, 0.6)
    assert ck.contains(BV, BU, ck.Margin(0.0))


def test_optical_erode_inverts_dilate(grid128, mink128):
    U = ck.ball(grid128, C, 1.5)
    shrunk = ck.optical_erode(mink128, 0.0, U, 0.5)
    assert ck.hausdorff(shrunk, ck.ball(grid128, C, 1.0)) <= 2 * grid128.spacing


def test_redistance_recovers_euclidean_units(grid128):
    M = ck.ultrastatic(grid128, 4.0)
    B = ck.optical_ball(M, 0.0, ck.ball(grid128, C, 1.0), 1.0)  # optical units
    R = ck.redistance(B)
    assert R.units == "euclidean"
    want = ck.ball(grid128, C, 1.5).sdf
    inner = np.abs(want) < 1.0
    assert float(np.max(np.abs(R.sdf - want)[inner])) <= 1.5 * grid128.spacing


def test_boundary_points_subcell(grid64):
    b = ck.ball(grid64, C, 1.3)
    pts = regions.boundary_points(b)
    r = grid64.torus_distance(pts, np.array(C))
    assert float(np.max(np.abs(r - 1.3))) <= grid64.spacing


def test_diameter(grid64):
    b = ck.ball(grid64, C, 1.2)
    d = regions.diameter(b)
    assert 2.4 - grid64.spacing <= d <= 2.4 + 3 * grid64.spacing


def test_box_and_annulus_shapes(grid64):
    bx = ck.box(grid64, [2.0, 2.0], [5.0, 6.0])
    assert bx.sample(np.array([3.5, 4.0])) > 0
    assert bx.sample(np.array([1.0, 1.0])) < 0
    an = ck.annulus(grid64, C, 1.0, 2.0)
    assert an.sample(np.array([4.0 + 1.5, 4.0])) > 0
    assert an.sample(np.array([4.0, 4.0])) < 0


def test_area(grid64):
    b = ck.ball(grid64, C, 1.0)
    assert b.area() == pytest.approx(np.pi, abs=0.2)


def test_contour_polylines_circle(grid64):
    b = ck.ball(grid64, C, 1.3)
    lines = regions.contour_polylines(b)
    assert lines
    pts = np.concatenate(lines, axis=0)
    r = np.sqrt(((pts - np.array(C)) ** 2).sum(axis=1))
    assert np.max(np.abs(r - 1.3)) <= grid64.spacing


def test_one_dimensional_regions():
    g = ck.SpatialGrid(1, 64, 8.0)
    M = ck.minkowski(g)
    U = ck.ball(g, [4.0], 1.0)
    B = ck.optical_ball(M, 0.0, U, 0.5)
    assert ck.hausdorff(B, ck.ball(g, [4.0], 1.5)) <= 2 * g.spacing
