"""Sliding-window k-center through a coreset of representatives.

Each :class:`CoresetSketch` runs for one estimate ``r``. It keeps at most
``capacity`` active centers spaced more than ``threshold`` apart, each with a
representative (its latest nearby point), plus representatives whose center
has expired. While feasible, every alive point is within ``2*threshold`` of a
representative, so solving k-center on the representatives and inflating the
balls by ``2*threshold`` covers the window.

The :class:`RLadder` mirrors the 1-center ladder: grid indices are grouped
into segments that share one sketch state.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, List, Optional

from .exceptions import RejectedInput, RejectedQuery
from .geometry import Ball
from .grid import Grid
from .one_center import GammaLadder
from .oracles import (
    EXACT_K_CENTER_CAP,
    exact_k_center,
    greedy_2approx_k_center,
    min_enclosing_ball,
)
from .window import TimedPoint, WindowClock

SQRT3 = math.sqrt(3.0)
EXACT_C1 = "exact_c1"
GREEDY_C2 = "greedy_c2"
SOLVERS = (EXACT_C1, GREEDY_C2)

# Doubling-exponent multiplier used when the caller does not supply one.
DEFAULT_DOUBLING_PER_DIM = 2.77


@dataclass(frozen=True)
class LowDimConfig:
    """Trade-off ``t`` and doubling exponent bound for the low-dimension variant.

    ``t = 0`` is the base algorithm. ``doubling_exponent=None`` resolves to
    ``2.77 * d`` once the dimension is known.
    """

    t: int = 0
    doubling_exponent: Optional[float] = None

    def __post_init__(self) -> None:
        if self.t < 0:
            raise RejectedInput("t must be non-negative")
        if self.doubling_exponent is not None and not self.doubling_exponent > 0:
            raise RejectedInput("doubling exponent must be positive")

    def exponent(self, dim: int) -> float:
        if self.doubling_exponent is not None:
            return self.doubling_exponent
        return DEFAULT_DOUBLING_PER_DIM * dim

    def multiplier(self, dim: int) -> int:
        return 2 ** math.ceil(self.exponent(dim) * self.t)

    @property
    def shrink(self) -> float:
        return 0.5 ** self.t


def lowdim_factor(cfg: LowDimConfig, c: float) -> float:
    """Approximation factor without the epsilon term: ``c + 2*sqrt(3)*(1/2)**t``."""
    if c < 1:
        raise RejectedInput("solver factor c must be at least 1")
    return c + 2.0 * SQRT3 * cfg.shrink


class CoresetSketch:
    __slots__ = ("r", "k", "capacity", "threshold", "A", "reps", "orphans", "FT", "CT")

    def __init__(self, r: float, k: int, capacity: int, threshold: float) -> None:
        self.r = r
        self.k = k
        self.capacity = capacity
        self.threshold = threshold
        self.A: List[TimedPoint] = []
        self.reps: Dict[int, TimedPoint] = {}  # active center time -> representative
        self.orphans: List[TimedPoint] = []
        self.FT = 0
        self.CT = 0

    @classmethod
    def new(cls, r: float, k: int, cfg: LowDimConfig = LowDimConfig(), dim: int = 2) -> "CoresetSketch":
        if not r > 0:
            raise RejectedInput("r must be positive")
        if k < 1:
            raise RejectedInput("k must be positive")
        return cls(r, k, 2 * k * cfg.multiplier(dim), SQRT3 * cfg.shrink * r)

    def copy(self, r: Optional[float] = None) -> "CoresetSketch":
        s = CoresetSketch.__new__(CoresetSketch)
        s.r = self.r if r is None else r
        s.k = self.k
        s.capacity = self.capacity
        s.threshold = self.threshold if r is None else self.threshold / self.r * r
        s.A = list(self.A)
        s.reps = dict(self.reps)
        s.orphans = list(self.orphans)
        s.FT = self.FT
        s.CT = self.CT
        return s

    def _expire(self, now: int, window_size: int) -> None:
        cutoff = now - window_size
        if self.orphans and self.orphans[0].time <= cutoff:
            self.orphans = [x for x in self.orphans if x.time > cutoff]
        while self.A and self.A[0].time <= cutoff:
            a = self.A.pop(0)
            rep = self.reps.pop(a.time)
            if rep.time > cutoff:
                self._add_orphan(rep)

    def _add_orphan(self, rep: TimedPoint) -> None:
        if any(x.time == rep.time for x in self.orphans):
            return
        self.orphans.append(rep)
        self.orphans.sort(key=lambda x: x.time)

    def _evict_oldest(self, window_size: int) -> None:
        a = self.A.pop(0)
        rep = self.reps.pop(a.time)
        self.FT = a.time + window_size
        if rep.time > a.time:
            self._add_orphan(rep)
        self.orphans = [x for x in self.orphans if x.time > a.time]

    def update(self, p: TimedPoint, window_size: int) -> "CoresetSketch":
        if p.time <= self.CT:
            raise RejectedInput(f"arrival at time {p.time} after time {self.CT}")
        self.CT = p.time
        self._expire(p.time, window_size)
        thr = self.threshold
        x = p.point
        members = [a for a in self.A if math.dist(x, a.point) <= thr]
        if members:
            for a in members:
                self.reps[a.time] = p
            return self
        if len(self.A) == self.capacity:
            self._evict_oldest(window_size)
        self.A.append(p)
        self.reps[p.time] = p
        return self

    def compared_distances(self, p: TimedPoint, window_size: int) -> List[float]:
        cutoff = p.time - window_size
        return [math.dist(p.point, a.point) for a in self.A if a.time > cutoff]

    def feasible(self) -> bool:
        return self.FT <= self.CT

    def coreset(self) -> List[TimedPoint]:
        if not self.feasible():
            raise RejectedQuery(f"coreset for r={self.r} is infeasible until time {self.FT}")
        return self.points()

    def points(self) -> List[TimedPoint]:
        """Representatives and orphans, deduplicated by time, oldest first."""
        seen = {x.time: x for x in self.reps.values()}
        for x in self.orphans:
            seen[x.time] = x
        return [seen[t] for t in sorted(seen)]

    def state(self) -> tuple:
        return (
            tuple(self.A),
            tuple(self.reps[a.time] for a in self.A),
            tuple(self.orphans),
            self.FT,
            self.CT,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoresetSketch):
            return NotImplemented
        return self.r == other.r and self.capacity == other.capacity and self.state() == other.state()

    def __repr__(self) -> str:
        return f"CoresetSketch(r={self.r!r}, |A|={len(self.A)}, |orphans|={len(self.orphans)}, FT={self.FT}, CT={self.CT})"


def cs_new(r: float, k: int, cfg: LowDimConfig = LowDimConfig(), dim: int = 2) -> CoresetSketch:
    return CoresetSketch.new(r, k, cfg, dim)


def cs_update(s: CoresetSketch, p: TimedPoint, clock: WindowClock) -> CoresetSketch:
    if p.time != clock.now:
        raise RejectedInput("sketch updates must use the clock's current arrival")
    return s.update(p, clock.window_size)


def cs_feasible(s: CoresetSketch) -> bool:
    return s.feasible()


def cs_coreset(s: CoresetSketch) -> List[TimedPoint]:
    return s.coreset()


@dataclass(frozen=True)
class KCenterSolution:
    balls: List[Ball]
    solver_tag: str
    r_used: float
    coreset_size: int = 0
    fell_back: bool = False

    @property
    def radius(self) -> float:
        return max(b.radius for b in self.balls)


def solve_k_center(points, k: int, solver: str):
    """Run the requested plug-in solver; returns (centers, radius, fell_back)."""
    if solver not in SOLVERS:
        raise RejectedInput(f"unknown solver {solver!r}")
    if solver == EXACT_C1:
        if k == 1:
            ball = min_enclosing_ball(points)
            return [ball.center], ball.radius, False
        if len(points) <= EXACT_K_CENTER_CAP:
            res = exact_k_center(points, k)
            return res.centers, res.radius, False
        res = greedy_2approx_k_center(points, k)
        return res.centers, res.radius, True
    res = greedy_2approx_k_center(points, k)
    return res.centers, res.radius, False


class RLadder:
    """Estimate ladder of coreset sketches for sliding-window k-center.

    Stored like the 1-center ladder: segments of grid indices sharing one
    sketch state, split where an arrival's membership tests differ and merged
    when neighbours coincide. The lowest segment is raised to the low witness
    when the recent points certify it; above ``r_U`` the single-center witness
    replaces the segments once the ladder outgrows its index span.
    """

    def __init__(
        self,
        k: int,
        epsilon: float,
        window_size: int,
        cfg: LowDimConfig = LowDimConfig(),
        companion: Optional[GammaLadder] = None,
    ) -> None:
        if k < 1:
            raise RejectedInput("k must be positive")
        self.k = k
        self.cfg = cfg
        self.grid = Grid(epsilon)
        self.window_size = window_size
        self.clock = WindowClock(window_size)
        self.companion = companion if companion is not None else GammaLadder(epsilon, window_size)
        self._owns_companion = companion is None
        self.dim: Optional[int] = None
        self.capacity = 0
        self.shrink = cfg.shrink
        self.starts: List[int] = []  # starts[0] is unused: the floor reaches -inf
        self.states: List[CoresetSketch] = []
        self.hi_idx: Optional[int] = None
        self.recent: Deque[TimedPoint] = deque()
        self.prev: Optional[TimedPoint] = None
        self.last: Optional[TimedPoint] = None

    @property
    def epsilon(self) -> float:
        return self.grid.epsilon

    @property
    def floor_idx(self) -> Optional[int]:
        return self.starts[1] - 1 if len(self.starts) > 1 else None

    @property
    def r_L(self) -> Optional[float]:
        i = self.floor_idx
        return None if i is None else self.grid.value(i)

    @property
    def r_U(self) -> Optional[float]:
        return None if self.hi_idx is None else self.grid.value(self.hi_idx)

    @property
    def size(self) -> int:
        return len(self.states)

    def threshold(self, r: float) -> float:
        return SQRT3 * self.shrink * r

    def _index_threshold_below(self, x: float) -> int:
        """Largest grid index whose threshold is strictly below ``x``."""
        i = self.grid.index_below(x / (SQRT3 * self.shrink))
        while self.threshold(self.grid.value(i)) >= x:
            i -= 1
        while self.threshold(self.grid.value(i + 1)) < x:
            i += 1
        return i

    def _new_sketch(self, r: float) -> CoresetSketch:
        return CoresetSketch(r, self.k, self.capacity, self.threshold(r))

    def _at(self, s: CoresetSketch, r: float) -> CoresetSketch:
        c = s.copy(r)
        c.threshold = self.threshold(r)
        return c

    def _r(self, a: Optional[int], b: Optional[int]) -> float:
        if a is not None:
            return self.grid.value(a)
        if b is not None:
            return self.grid.value(b)
        return 1.0

    def state_at(self, i: int) -> CoresetSketch:
        j = bisect_right(self.starts, i, lo=1) - 1
        return self._at(self.states[j], self.grid.value(i))

    def _witness_low(self, r: float) -> CoresetSketch:
        """Last ``capacity`` alive points, each its own center; infeasible while an older witness point lives."""
        n = self.last.time
        alive = [x for x in self.recent if x.time > n - self.window_size]
        s = self._new_sketch(r)
        if len(alive) == self.capacity + 1:
            s.FT = alive[0].time + self.window_size
            alive = alive[1:]
        s.A = alive
        s.reps = {a.time: a for a in alive}
        s.CT = n
        return s

    def _witness_high(self, r: float, p: TimedPoint) -> CoresetSketch:
        s = self._new_sketch(r)
        s.A = [p]
        s.reps = {p.time: p}
        s.CT = p.time
        return s

    def ingest(self, x) -> TimedPoint:
        p = self.clock.advance(tuple(x))
        self.update(p)
        return p

    def update(self, p: TimedPoint) -> None:
        if self.last is not None and p.time != self.last.time + 1:
            raise RejectedInput(f"expected arrival {self.last.time + 1}, got {p.time}")
        if self.clock.now < p.time:
            self.clock.now = p.time
        if self._owns_companion:
            self.companion.update(p)
        n_win = self.window_size
        self.prev, self.last = self.last, p
        if self.prev is None:
            self.dim = len(p.point)
            self.capacity = 2 * self.k * self.cfg.multiplier(self.dim)
            self.recent = deque([p], maxlen=self.capacity + 1)
            self.starts, self.states = [0], [self._new_sketch(1.0).update(p, n_win)]
            return
        self.recent.append(p)

        starts: List[int] = []
        states: List[CoresetSketch] = []
        m = len(self.states)
        for j, st in enumerate(self.states):
            a = self.starts[j] if j > 0 else None
            b = self.starts[j + 1] - 1 if j + 1 < m else None
            cuts = {self._index_threshold_below(d) for d in st.compared_distances(p, n_win) if d > 0.0}
            pieces = [a] + sorted(
                c + 1 for c in cuts if (a is None or c >= a) and (b is None or c < b)
            )
            for i, lo in enumerate(pieces):
                hi = pieces[i + 1] - 1 if i + 1 < len(pieces) else b
                nxt = self._at(st, self._r(lo, hi)).update(p, n_win)
                if states and states[-1].state() == nxt.state():
                    continue
                starts.append(lo if lo is not None else 0)
                states.append(nxt)

        # Witness from the last capacity+1 alive points: all pairwise farther
        # apart than the greedy radius v, so no estimate with threshold < v
        # merges any two of them.
        window = [x for x in self.recent if x.time > p.time - n_win]
        if len(window) >= 2:
            v = greedy_2approx_k_center([x.point for x in window], len(window) - 1).radius
            floor_top = starts[1] - 1 if len(starts) > 1 else None
            if v > 0.0:
                cand = self._index_threshold_below(v)
                if floor_top is None or cand > floor_top:
                    j = bisect_right(starts, cand + 1, lo=1) - 1
                    low = self._witness_low(self.grid.value(cand))
                    new_starts, new_states = [0], [low]
                    if j == 0 or starts[j] <= cand:
                        new_starts.append(cand + 1)
                        new_states.append(states[j])
                        j += 1
                    new_starts += starts[j:]
                    new_states += states[j:]
                    starts, states = new_starts, new_states

        self.starts, self.states = starts, states
        gamma_e = self.companion.gamma_e
        if len(states) == 1 or gamma_e is None:
            return
        hi = self.grid.index_at_least(6.0 * self.grid.base * gamma_e / (SQRT3 * self.shrink))
        self.hi_idx = hi
        if len(states) > hi - self.floor_idx + 2:
            # Every alive point is within sqrt(3) r_U of p_n: one center suffices above r_U.
            cut = bisect_right(starts, hi, lo=1)
            del starts[cut:], states[cut:]
            starts.append(hi + 1)
            states.append(self._witness_high(self.grid.value(hi + 1), p))

    def chosen(self):
        """(r_used, sketch) of the smallest feasible estimate; r_used is 0 for the floor."""
        for j, s in enumerate(self.states):
            if s.feasible():
                if j == 0:
                    return 0.0, s
                return self.grid.value(self.starts[j]), self._at(s, self.grid.value(self.starts[j]))
        return None, None

    def solve(self, solver: str = GREEDY_C2) -> KCenterSolution:
        if self.last is None:
            raise RejectedQuery("no point has been ingested")
        if solver not in SOLVERS:
            raise RejectedInput(f"unknown solver {solver!r}")
        if self.companion.degenerate():
            return KCenterSolution([Ball(self.last.point, 0.0)], solver, 0.0, 1)
        r_used, sketch = self.chosen()
        if sketch is None:
            raise RejectedQuery("no feasible estimate is maintained")
        core = sketch.points()
        pts = list(dict.fromkeys(x.point for x in core))
        centers, rho, fell_back = solve_k_center(pts, self.k, solver)
        inflate = 2.0 * self.threshold(r_used)
        balls = [Ball(c, rho + inflate) for c in centers]
        return KCenterSolution(balls, solver, r_used, len(core), fell_back)


def rladder_update(ladder: RLadder, p: TimedPoint, clock: WindowClock) -> RLadder:
    if p.time != clock.now:
        raise RejectedInput("ladder updates must use the clock's current arrival")
    ladder.update(p)
    return ladder


def rladder_solve(ladder: RLadder, solver: str = GREEDY_C2) -> KCenterSolution:
    return ladder.solve(solver)
