"""Offline reference solvers.

These serve two purposes: plug-in c-approximation solvers run on a coreset at
query time, and brute-force ground truth for tests and the metrics harness.
None of them is incremental.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .exceptions import RejectedInput
from .geometry import Ball, Point, as_point

EXACT_K_CENTER_CAP = 14

# Containment slack used inside the move-to-front recursion.
_MTF_EPS = 1e-12


@dataclass(frozen=True)
class KCenterResult:
    centers: List[Point]
    radius: float
    groups: List[List[Point]] = field(default_factory=list, compare=False, repr=False)


def _validated(points: Sequence[Sequence[float]]) -> List[Point]:
    pts = [as_point(p) for p in points]
    if not pts:
        raise RejectedInput("empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise RejectedInput("mixed dimensions in point set")
    return pts


def _circumball(support: Sequence[Point]) -> Ball:
    """Smallest ball with every support point on its boundary."""
    p0 = support[0]
    if len(support) == 1:
        return Ball(p0, 0.0)
    base = np.asarray(p0, dtype=float)
    a = np.asarray(support[1:], dtype=float) - base
    gram = 2.0 * (a @ a.T)
    rhs = np.einsum("ij,ij->i", a, a)
    lam, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    center = tuple(float(c) for c in base + lam @ a)
    return Ball(center, max(math.dist(center, s) for s in support))


def _inside(ball: Ball, p: Point) -> bool:
    return math.dist(ball.center, p) <= ball.radius * (1.0 + _MTF_EPS) + _MTF_EPS


def _mtf(pts: List[Point], n: int, support: List[Point], dim: int) -> Ball:
    if support and (n == 0 or len(support) == dim + 1):
        return _circumball(support)
    ball = _circumball(support) if support else Ball(pts[0], 0.0)
    for i in range(n):
        p = pts[i]
        if not _inside(ball, p):
            ball = _mtf(pts, i, support + [p], dim)
    return ball


def min_enclosing_ball(points: Sequence[Sequence[float]]) -> Ball:
    """Minimum enclosing ball by randomized move-to-front recursion.

    Exact in every dimension up to floating point; the returned radius is
    re-measured against all inputs so containment never depends on the
    recursion's internal slack.
    """
    pts = _validated(points)
    uniq = list(dict.fromkeys(pts))
    if len(uniq) == 1:
        return Ball(uniq[0], 0.0)
    random.Random(0x5EB).shuffle(uniq)
    ball = _mtf(uniq, len(uniq), [], len(uniq[0]))
    return Ball(ball.center, max(math.dist(ball.center, p) for p in uniq))


def greedy_2approx_k_center(points: Sequence[Sequence[float]], k: int) -> KCenterResult:
    """Farthest-first traversal seeded at the first input point.

    Ties go to the lowest input index. Stops early once every point
    coincides with a center.
    """
    pts = _validated(points)
    if k < 1:
        raise RejectedInput("k must be positive")
    centers_idx = [0]
    nearest = [math.dist(pts[0], p) for p in pts]
    while len(centers_idx) < k:
        far = max(range(len(pts)), key=lambda i: (nearest[i], -i))
        if nearest[far] == 0.0:
            break
        centers_idx.append(far)
        c = pts[far]
        nearest = [min(nearest[i], math.dist(c, p)) for i, p in enumerate(pts)]
    return KCenterResult([pts[i] for i in centers_idx], max(nearest))


def exact_k_center(points: Sequence[Sequence[float]], k: int) -> KCenterResult:
    """Optimal k-center radius by branch and bound over set partitions.

    Each group is charged the radius of its minimum enclosing ball; the
    returned centers are those balls' centers. Desk-scale only.
    """
    pts = _validated(points)
    if len(pts) > EXACT_K_CENTER_CAP:
        raise RejectedInput(
            f"exact k-center is capped at {EXACT_K_CENTER_CAP} points, got {len(pts)}"
        )
    if k < 1:
        raise RejectedInput("k must be positive")
    uniq = list(dict.fromkeys(pts))
    if k >= len(uniq):
        return KCenterResult(list(uniq), 0.0, [[p] for p in uniq])
    if k == 1:
        ball = min_enclosing_ball(uniq)
        return KCenterResult([ball.center], ball.radius, [list(uniq)])

    # Farthest-first order puts spread-out points first, which makes the
    # radius bound bite early in the search.
    order = [uniq[0]]
    rest = uniq[1:]
    nearest = [math.dist(uniq[0], p) for p in rest]
    while rest:
        j = max(range(len(rest)), key=lambda i: (nearest[i], -i))
        c = rest.pop(j)
        nearest.pop(j)
        order.append(c)
        nearest = [min(nd, math.dist(c, p)) for nd, p in zip(nearest, rest)]
    lower = min(math.dist(a, b) for i, a in enumerate(order[: k + 1]) for b in order[:i]) / 2.0

    # Seed the incumbent with the partition induced by the first k points.
    seeds = order[:k]
    seed_groups: List[List[Point]] = [[] for _ in seeds]
    for p in order:
        j = min(range(k), key=lambda i: math.dist(seeds[i], p))
        seed_groups[j].append(p)
    seed_balls = [min_enclosing_ball(g) for g in seed_groups]
    best = {"radius": max(b.radius for b in seed_balls), "balls": seed_balls, "groups": seed_groups}
    n = len(order)

    def search(i: int, groups: List[List[Point]], balls: List[Ball], worst: float) -> bool:
        if worst >= best["radius"]:
            return False
        if i == n:
            best.update(radius=worst, balls=list(balls), groups=[list(g) for g in groups])
            return best["radius"] <= lower * (1.0 + 1e-12)
        p = order[i]
        options = []
        for j, g in enumerate(groups):
            b = balls[j] if _inside(balls[j], p) else min_enclosing_ball(g + [p])
            if b.radius < best["radius"] * (1.0 - 1e-12):
                options.append((b.radius, j, b))
        options.sort(key=lambda o: (o[0], o[1]))
        for radius, j, b in options:
            if radius >= best["radius"] * (1.0 - 1e-12):
                break
            old = balls[j]
            groups[j].append(p)
            balls[j] = b
            done = search(i + 1, groups, balls, max(worst, b.radius))
            groups[j].pop()
            balls[j] = old
            if done:
                return True
        if len(groups) < k:
            groups.append([p])
            balls.append(Ball(p, 0.0))
            done = search(i + 1, groups, balls, worst)
            groups.pop()
            balls.pop()
            if done:
                return True
        return False

    if best["radius"] > lower * (1.0 + 1e-12):
        search(1, [[order[0]]], [Ball(order[0], 0.0)], 0.0)
    balls = best["balls"]
    return KCenterResult([b.center for b in balls], max(b.radius for b in balls), best["groups"])


def _pairwise(points: Sequence[Sequence[float]]) -> np.ndarray:
    x = np.asarray(_validated(points), dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def diameter(points: Sequence[Sequence[float]]) -> float:
    return float(_pairwise(points).max())


def closest_pair_nonzero(points: Sequence[Sequence[float]]) -> Optional[float]:
    if len(points) < 2:
        raise RejectedInput("closest pair needs at least two points")
    d = _pairwise(points)
    positive = d[d > 0.0]
    return float(positive.min()) if positive.size else None


def aspect_ratio(points: Sequence[Sequence[float]]) -> Optional[float]:
    cp = closest_pair_nonzero(points)
    return None if cp is None else diameter(points) / cp
