import itertools
import math

import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slidingcenter.exceptions import RejectedInput
from slidingcenter.geometry import contains
from slidingcenter.oracles import (
    EXACT_K_CENTER_CAP,
    aspect_ratio,
    closest_pair_nonzero,
    diameter,
    exact_k_center,
    greedy_2approx_k_center,
    min_enclosing_ball,
)

coord = st.floats(-100, 100, allow_nan=False).map(lambda v: round(v, 3))


def point_sets(d, lo=1, hi=12):
    return st.lists(st.tuples(*[coord] * d), min_size=lo, max_size=hi)


def socp_radius(points):
    """Minimum enclosing ball radius from a second-order cone program."""
    x = np.asarray(points, dtype=float)
    c = cp.Variable(x.shape[1])
    r = cp.Variable()
    prob = cp.Problem(cp.Minimize(r), [cp.norm(x[i] - c) <= r for i in range(len(x))])
    prob.solve(solver=cp.CLARABEL)
    return float(r.value)


def brute_k_center(points, k):
    """Try every assignment of points to k labels (tiny inputs only)."""
    best = math.inf
    for labels in itertools.product(range(k), repeat=len(points)):
        groups = [[p for p, g in zip(points, labels) if g == j] for j in range(k)]
        best = min(best, max(min_enclosing_ball(g).radius for g in groups if g))
    return best


def test_meb_single_point():
    ball = min_enclosing_ball([(0.0, 0.0)])
    assert ball.center == (0.0, 0.0) and ball.radius == 0.0


def test_meb_two_points():
    ball = min_enclosing_ball([(0.0, 0.0), (2.0, 0.0)])
    assert ball.center == pytest.approx((1.0, 0.0)) and ball.radius == pytest.approx(1.0)


def test_meb_equilateral():
    s = math.sqrt(3) / 2
    ball = min_enclosing_ball([(0, 1), (s, -0.5), (-s, -0.5)])
    assert ball.center == pytest.approx((0.0, 0.0), abs=1e-12)
    assert ball.radius == pytest.approx(1.0)


def test_meb_empty_rejected():
    with pytest.raises(RejectedInput):
        min_enclosing_ball([])


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_meb_matches_socp(d):
    rng = np.random.default_rng(d)
    for _ in range(15):
        pts = [tuple(row) for row in rng.normal(size=(int(rng.integers(2, 30)), d))]
        ball = min_enclosing_ball(pts)
        assert all(contains(ball, p) for p in pts)
        assert ball.radius == pytest.approx(socp_radius(pts), rel=1e-5)


@given(point_sets(2, 2, 15))
def test_meb_is_minimal(pts):
    ball = min_enclosing_ball(pts)
    assert all(contains(ball, p) for p in pts)
    if ball.radius > 1e-6:
        shrunk = ball.radius * (1 - 1e-6)
        assert any(math.dist(ball.center, p) > shrunk for p in pts)


@given(point_sets(3, 1, 10))
def test_meb_minimal_3d(pts):
    ball = min_enclosing_ball(pts)
    assert all(contains(ball, p) for p in pts)
    # Jung's theorem in 3D: R <= D * sqrt(3/8); and R >= D/2.
    assert diameter(pts) / 2 <= ball.radius * (1 + 1e-9) + 1e-9
    assert ball.radius <= diameter(pts) * math.sqrt(3 / 8) * (1 + 1e-9) + 1e-9


def test_exact_k_center_examples():
    pts = [(0, 0), (1, 0), (10, 0), (11, 0)]
    assert exact_k_center(pts, 2).radius == pytest.approx(0.5)
    assert exact_k_center(pts, 4).radius == 0.0
    assert exact_k_center(pts, 7).radius == 0.0
    assert exact_k_center(pts, 1).radius == pytest.approx(min_enclosing_ball(pts).radius)


def test_exact_k_center_cap():
    with pytest.raises(RejectedInput):
        exact_k_center([(float(i), 0.0) for i in range(EXACT_K_CENTER_CAP + 1)], 2)


@given(point_sets(2, 1, 7), st.integers(1, 3))
def test_exact_k_center_matches_assignment_search(pts, k):
    res = exact_k_center(pts, k)
    assert res.radius == pytest.approx(brute_k_center(pts, k), rel=1e-9, abs=1e-9)
    assert len(res.centers) <= k
    assert all(any(math.dist(c, p) <= res.radius * (1 + 1e-9) + 1e-9 for c in res.centers) for p in pts)


def test_greedy_example():
    res = greedy_2approx_k_center([(0, 0), (1, 0), (10, 0), (11, 0)], 2)
    assert [tuple(c) for c in res.centers] == [(0.0, 0.0), (11.0, 0.0)]
    assert res.radius == pytest.approx(1.0)


def test_greedy_trivial_cases():
    assert greedy_2approx_k_center([(3.0, 4.0)], 1).radius == 0.0
    assert greedy_2approx_k_center([(0, 0), (1, 1), (2, 2)], 3).radius == 0.0
    with pytest.raises(RejectedInput):
        greedy_2approx_k_center([], 1)


@given(point_sets(2, 1, 12), st.integers(1, 4))
def test_greedy_within_factor_two(pts, k):
    exact = exact_k_center(pts, k).radius
    greedy = greedy_2approx_k_center(pts, k).radius
    assert exact <= greedy * (1 + 1e-9) + 1e-9
    assert greedy <= 2 * exact * (1 + 1e-9) + 1e-9


def test_diameter_examples():
    assert diameter([(0, 0)]) == 0.0
    assert diameter([(0, 0), (2, 0), (1, 1)]) == pytest.approx(2.0)
    assert diameter([(0, 0), (3, 4)]) == pytest.approx(5.0)


def test_closest_pair_examples():
    assert closest_pair_nonzero([(0, 0), (0, 0), (5, 0)]) == pytest.approx(5.0)
    assert closest_pair_nonzero([(0, 0), (1, 0), (10, 0)]) == pytest.approx(1.0)
    assert closest_pair_nonzero([(0, 0), (0, 0)]) is None
    with pytest.raises(RejectedInput):
        closest_pair_nonzero([(0, 0)])


def test_aspect_ratio_examples():
    assert aspect_ratio([(0, 0), (1, 0), (10, 0)]) == pytest.approx(10.0)
    assert aspect_ratio([(0, 0), (1, 0)]) == pytest.approx(1.0)
    assert aspect_ratio([(2, 2), (2, 2), (2, 2)]) is None


def _unit_ball(rng, d):
    v = rng.normal(size=d)
    return v / np.linalg.norm(v) * rng.random() ** (1 / d)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_sqrt3_packing(d):
    rng = np.random.default_rng(100 + d)
    tri = rng.normal(size=(20000, 3, d))
    tri /= np.linalg.norm(tri, axis=2, keepdims=True)
    tri *= rng.random((20000, 3, 1)) ** (1 / d)
    sides = np.linalg.norm(tri[:, [0, 0, 1]] - tri[:, [1, 2, 2]], axis=2)
    assert sides.min(axis=1).max() <= math.sqrt(3) + 1e-9


def test_equilateral_sqrt3_triple_has_unit_meb():
    s = math.sqrt(3) / 2
    tri = [(0, 1), (s, -0.5), (-s, -0.5)]
    assert all(math.dist(a, b) == pytest.approx(math.sqrt(3)) for a, b in itertools.combinations(tri, 2))
    assert min_enclosing_ball(tri).radius == pytest.approx(1.0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_two_ball_cover(d):
    nprng = np.random.default_rng(d)
    checked = 0
    while checked < 200:
        c1, c2 = _unit_ball(nprng, d), _unit_ball(nprng, d)
        if np.linalg.norm(c1 - c2) <= math.sqrt(3):
            continue
        checked += 1
        for _ in range(50):
            x = _unit_ball(nprng, d)
            assert min(np.linalg.norm(x - c1), np.linalg.norm(x - c2)) <= math.sqrt(3) + 1e-9
