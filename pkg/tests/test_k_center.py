import math
import random
from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reference import ReferenceCoreset
from slidingcenter.exceptions import RejectedInput, RejectedQuery
from slidingcenter.geometry import contains
from slidingcenter.k_center import (
    EXACT_C1,
    GREEDY_C2,
    SQRT3,
    LowDimConfig,
    RLadder,
    cs_coreset,
    cs_feasible,
    cs_new,
    cs_update,
    lowdim_factor,
    rladder_solve,
    rladder_update,
)
from slidingcenter.oracles import aspect_ratio, exact_k_center, min_enclosing_ball
from slidingcenter.window import TimedPoint, WindowClock


def as_pair(p):
    return (p.point, p.time)


def plain(state):
    A, reps, orphans, FT, CT = state
    return (
        tuple(map(as_pair, A)),
        tuple(map(as_pair, reps)),
        tuple(map(as_pair, orphans)),
        FT,
        CT,
    )


small = st.integers(-6, 6).map(float)
streams = st.lists(st.tuples(small, small), min_size=1, max_size=60)


def run_sketch(points, window, r=1.0, k=1, cfg=LowDimConfig()):
    clock = WindowClock(window)
    s = cs_new(r, k, cfg, dim=len(points[0]))
    for x in points:
        cs_update(s, clock.advance(tuple(float(v) for v in x)), clock)
    return s, clock


# -- sketch ----------------------------------------------------------------


def test_new_base_capacity_and_threshold():
    s = cs_new(1.0, 2)
    assert s.capacity == 4 and s.threshold == pytest.approx(SQRT3)


def test_new_lowdim_capacity_and_threshold():
    s = cs_new(1.0, 1, LowDimConfig(t=1, doubling_exponent=2))
    assert s.capacity == 8 and s.threshold == pytest.approx(SQRT3 / 2)


def test_new_is_feasible():
    assert cs_feasible(cs_new(3.0, 2))


@pytest.mark.parametrize("r, k", [(0.0, 1), (-1.0, 1), (1.0, 0)])
def test_new_rejects(r, k):
    with pytest.raises(RejectedInput):
        cs_new(r, k)


def test_capacity_eviction_makes_sketch_infeasible():
    s, _ = run_sketch([(0, 0), (10, 0), (20, 0)], 10**6)
    assert [a.point for a in s.A] == [(10.0, 0.0), (20.0, 0.0)]
    assert s.FT == 1 + 10**6
    assert not cs_feasible(s)
    with pytest.raises(RejectedQuery):
        cs_coreset(s)


def test_feasible_again_after_window_passes():
    N = 5
    pts = [(0, 0), (10, 0), (20, 0)] + [(20, 0)] * N
    s, _ = run_sketch(pts[:3], N)
    assert not cs_feasible(s)
    s, _ = run_sketch(pts, N)
    assert s.FT == 1 + N and cs_feasible(s)


def test_membership_updates_representative():
    s, _ = run_sketch([(0, 0), (1, 0), (0.5, 0.5)], 10**6)
    assert [a.point for a in s.A] == [(0.0, 0.0)]
    assert s.reps[1].point == (0.5, 0.5)


def test_membership_is_non_strict():
    s, _ = run_sketch([(0, 0), (SQRT3, 0)], 100)
    assert len(s.A) == 1


def test_out_of_order_rejected():
    s = cs_new(1.0, 1)
    s.update(TimedPoint((0.0,), 3), 10)
    with pytest.raises(RejectedInput):
        s.update(TimedPoint((0.0,), 3), 10)


def test_single_point_coreset():
    s, _ = run_sketch([(4, 2)], 3)
    assert [p.point for p in cs_coreset(s)] == [(4.0, 2.0)]


@given(streams, st.integers(1, 20), st.sampled_from([0.3, 1.0, 2.0]), st.integers(1, 3))
def test_conformance_with_reference(points, window, r, k):
    clock = WindowClock(window)
    s = cs_new(r, k, dim=2)
    ref = ReferenceCoreset(s.threshold, s.capacity)
    for x in points:
        p = clock.advance(x)
        cs_update(s, p, clock)
        ref.step((p.point, p.time), window)
        assert plain(s.state()) == ref.fields()


@given(streams, st.integers(1, 20), st.sampled_from([0.3, 1.0, 2.0]), st.integers(1, 3))
def test_space_and_packing(points, window, r, k):
    clock = WindowClock(window)
    s = cs_new(r, k, dim=2)
    for x in points:
        cs_update(s, clock.advance(x), clock)
        assert len(s.A) <= 2 * k
        assert len(s.points()) <= 4 * k
        assert len(s.reps) == len(s.A)
        for i, a in enumerate(s.A):
            assert all(math.dist(a.point, b.point) > s.threshold for b in s.A[:i])
            rep = s.reps[a.time]
            assert math.dist(a.point, rep.point) <= s.threshold and rep.time >= a.time


def _ball_point(rng, d, radius):
    v = rng.normal(size=d)
    return tuple(v / np.linalg.norm(v) * radius * rng.random() ** (1 / d))


def test_window_in_ball_gives_tiny_coreset():
    rng = np.random.default_rng(3)
    for _ in range(100):
        r = float(rng.uniform(0.5, 2))
        pts = [_ball_point(rng, 2, r) for _ in range(int(rng.integers(1, 40)))]
        s, _ = run_sketch(pts, 10**6, r=r, k=1)
        assert cs_feasible(s) and len(cs_coreset(s)) <= 2


@given(streams, st.integers(1, 10), st.integers(1, 2))
def test_feasible_sketch_covers_window_when_r_is_large_enough(points, window, k):
    alive = points[-window:]
    r_star = exact_k_center(alive, k).radius
    for r in (r_star, r_star * 1.3 + 0.01):
        if r <= 0:
            continue
        s, _ = run_sketch(points, window, r=r, k=k)
        assert cs_feasible(s)
        core = [p.point for p in cs_coreset(s)]
        for x in alive:
            assert min(math.dist(x, c) for c in core) <= 2 * s.threshold * (1 + 1e-9)


# -- low dimension factor ----------------------------------------------------


@pytest.mark.parametrize("t, want", [(1, 2.733), (3, 1.434), (5, 1.109), (8, 1.014), (10, 1.004)])
def test_lowdim_factor_table(t, want):
    assert lowdim_factor(LowDimConfig(t=t), 1.0) == pytest.approx(want, abs=0.01)


def test_lowdim_factor_abstract_constants():
    assert lowdim_factor(LowDimConfig(), 2.0) == pytest.approx(5.465, abs=0.01)
    assert lowdim_factor(LowDimConfig(), 1.0) == pytest.approx(4.465, abs=0.01)


def test_lowdim_config_validation():
    with pytest.raises(RejectedInput):
        LowDimConfig(t=-1)
    with pytest.raises(RejectedInput):
        LowDimConfig(doubling_exponent=0)
    with pytest.raises(RejectedInput):
        lowdim_factor(LowDimConfig(), 0.5)


# -- ladder --------------------------------------------------------------------


def feed(ladder, points):
    for x in points:
        ladder.ingest(tuple(float(v) for v in x))
    return ladder


def test_low_witness_example():
    L = RLadder(1, 0.1, 100)
    feed(L, [(float(i), 0.0) for i in range(8)] + [(0.0, 0.0), (5.0, 0.0)])
    w = L._witness_low(0.5)
    assert [(a.point, a.time) for a in w.A] == [((0.0, 0.0), 9), ((5.0, 0.0), 10)]
    assert w.FT == 8 + 100 and not w.feasible()


def test_high_witness_example():
    L = RLadder(2, 0.1, 100)
    feed(L, [(0, 0), (1, 0), (3, 3)])
    w = L._witness_high(50.0, L.last)
    assert w.A == [L.last] and w.feasible()


def test_solve_two_pairs_greedy():
    L = feed(RLadder(2, 0.1, 4), [(0, 0), (1, 0), (10, 0), (11, 0)])
    sol = rladder_solve(L, GREEDY_C2)
    assert len(sol.balls) <= 2
    for x in [(0, 0), (1, 0), (10, 0), (11, 0)]:
        assert any(contains(b, x) for b in sol.balls)
    assert sol.radius <= (2 + 2 * SQRT3) * 1.1 * 0.5


def test_solve_with_k_at_least_distinct_points():
    L = feed(RLadder(3, 0.1, 5), [(0, 0), (4, 0), (0, 4), (0, 0)])
    sol = rladder_solve(L, GREEDY_C2)
    assert sol.radius <= 2 * SQRT3 * sol.r_used + 1e-12


def test_solve_empty_rejected():
    with pytest.raises(RejectedQuery):
        RLadder(2, 0.1, 4).solve()


def test_solve_unknown_solver_rejected():
    L = feed(RLadder(2, 0.1, 4), [(0, 0)])
    with pytest.raises(RejectedInput):
        L.solve("magic")


def test_update_checks_clock():
    L = RLadder(1, 0.1, 4)
    clock = WindowClock(4)
    rladder_update(L, clock.advance((0.0,)), clock)
    with pytest.raises(RejectedInput):
        rladder_update(L, TimedPoint((1.0,), 3), clock)


def segments(L):
    """(largest grid value it stands for, sketch) per stored segment; None is +inf."""
    out = []
    for j, s in enumerate(L.states):
        top = L.starts[j + 1] - 1 if j + 1 < len(L.states) else None
        out.append((None if top is None else L.grid.value(top), s))
    return out


def _check_rladder(points, window, k, eps, solver, cfg=LowDimConfig(), factor_c=None):
    L = RLadder(k, eps, window, cfg)
    ring = deque(maxlen=window)
    c = factor_c if factor_c is not None else (1.0 if solver == EXACT_C1 else 2.0)
    for x in points:
        L.ingest(x)
        ring.append(tuple(float(v) for v in x))
        alive = list(ring)
        sol = L.solve(solver)
        assert all(any(contains(b, p) for b in sol.balls) for p in alive)
        r_star = exact_k_center(alive, k).radius
        if not sol.fell_back:
            assert sol.radius <= lowdim_factor(cfg, c) * (1 + eps) * r_star * (1 + 1e-9) + 1e-12
        for top, s in segments(L):
            assert len(s.A) <= s.capacity and len(s.points()) <= 2 * s.capacity
            if top is None or top >= r_star:
                assert s.feasible()
        if len(set(alive)) >= 2:
            bound = math.ceil(math.log(12 * aspect_ratio(alive)) / math.log(1 + eps)) + 4
            assert L.size <= bound
        # Grid sandwich: every grid value is represented, so the chosen
        # estimate is within one grid step of r*.
        if r_star > 0 and not L.companion.degenerate():
            assert sol.r_used <= (1 + eps) * r_star


@given(streams, st.integers(1, 12), st.integers(1, 3), st.sampled_from([0.1, 0.5]))
def test_rladder_exact_solver(points, window, k, eps):
    _check_rladder(points, window, k, eps, EXACT_C1)


@given(streams, st.integers(1, 12), st.integers(1, 4), st.sampled_from([0.1, 0.5]))
def test_rladder_greedy_solver(points, window, k, eps):
    _check_rladder(points, window, k, eps, GREEDY_C2)


@given(streams, st.integers(1, 10), st.integers(1, 2))
def test_rladder_lowdim(points, window, k):
    _check_rladder(points, window, k, 0.1, EXACT_C1, LowDimConfig(t=1))


def test_rladder_random_streams_exact():
    rng = random.Random(11)
    for _ in range(50):
        pts = [(rng.gauss(0, 3), rng.gauss(0, 3)) for _ in range(60)]
        _check_rladder(pts, rng.randint(3, 12), rng.randint(1, 3), 0.1, EXACT_C1)


def test_exact_solver_falls_back_above_cap():
    rng = random.Random(2)
    pts = [(rng.uniform(0, 1000), rng.uniform(0, 1000)) for _ in range(40)]
    L = feed(RLadder(8, 0.1, 40), pts)
    sol = L.solve(EXACT_C1)
    if sol.coreset_size > 14:
        assert sol.fell_back
    assert all(any(contains(b, p) for b in sol.balls) for p in pts)


def test_k_one_exact_uses_meb():
    pts = [(0, 0), (2, 0), (1, 1)]
    L = feed(RLadder(1, 0.1, 10), pts)
    sol = L.solve(EXACT_C1)
    assert not sol.fell_back
    assert sol.radius <= (1 + 2 * SQRT3) * 1.1 * min_enclosing_ball(pts).radius
