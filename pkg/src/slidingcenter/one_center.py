"""Sliding-window 1-center via the bridge-point diameter sketch.

A :class:`DiameterSketch` tracks one estimate ``gamma``; a :class:`GammaLadder`
keeps sketches for a contiguous range of grid estimates and answers with the
smallest estimate whose sketch certifies a single cluster.

The ladder stores the grid as segments of indices that share one state.
An arrival splits a segment only where its comparisons ``d > gamma`` differ
across the segment, and neighbours that end up equal are merged again, so the
stored states are exactly those an eager ladder (one sketch per grid index,
all started with the stream) would hold. The lowest segment is reset to the
consecutive-pair witness on every distinct arrival. When the segment count
outgrows the index span between the floor and ``HEADROOM * gamma_e``, the
segments above that cap are folded into the one below it: a one-center state
stays valid for every larger estimate.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .exceptions import RejectedInput, RejectedQuery
from .geometry import Ball, midpoint
from .grid import Grid
from .window import TimedPoint, WindowClock

TWO_POINTS = "two_points"
ONE_CENTER = "one_center"


@dataclass(frozen=True)
class OneCenterAnswer:
    kind: str
    pair: Optional[Tuple[TimedPoint, TimedPoint]] = None
    ball: Optional[Ball] = None


class DiameterSketch:
    """Five-point state ``(c_old, c_new, q, r, b)`` for one estimate ``gamma``.

    ``b`` is the bridge point; it is only meaningful while ``c_new`` is None.
    """

    __slots__ = ("gamma", "c_old", "c_new", "q", "r", "b")

    def __init__(
        self,
        gamma: float,
        c_old: TimedPoint,
        c_new: Optional[TimedPoint],
        q: TimedPoint,
        r: TimedPoint,
        b: TimedPoint,
    ) -> None:
        self.gamma = gamma
        self.c_old = c_old
        self.c_new = c_new
        self.q = q
        self.r = r
        self.b = b

    @classmethod
    def new(cls, gamma: float, first: TimedPoint) -> "DiameterSketch":
        if not gamma > 0:
            raise RejectedInput("gamma must be positive")
        return cls(gamma, first, None, first, first, first)

    @classmethod
    def witness_low(cls, gamma: float, p_prev: TimedPoint, p_last: TimedPoint) -> "DiameterSketch":
        """State every estimate below the last consecutive distance is in."""
        if not gamma > 0:
            raise RejectedInput("gamma must be positive")
        if p_last.time != p_prev.time + 1:
            raise RejectedInput("witness points must be consecutive arrivals")
        if gamma > math.dist(p_prev.point, p_last.point):
            raise RejectedInput("low witness needs gamma <= |p_prev p_last|")
        return cls(gamma, p_prev, p_last, p_prev, p_last, p_prev)

    @classmethod
    def witness_high(cls, gamma: float, p_prev: TimedPoint) -> "DiameterSketch":
        """Valid state for any gamma above the alive set's diameter (caller's contract)."""
        if not gamma > 0:
            raise RejectedInput("gamma must be positive")
        return cls(gamma, p_prev, None, p_prev, p_prev, p_prev)

    def copy(self, gamma: Optional[float] = None) -> "DiameterSketch":
        return DiameterSketch(
            self.gamma if gamma is None else gamma, self.c_old, self.c_new, self.q, self.r, self.b
        )

    def state(self) -> tuple:
        return (self.c_old, self.c_new, self.q, self.r, self.b if self.c_new is None else None)

    def _expire(self, now: int, window_size: int) -> None:
        if self.c_old.time > now - window_size:
            return
        if self.c_new is not None and self.c_old == self.q:
            self.c_old, self.b, self.c_new = self.r, self.c_new, None
        elif self.c_new is not None:
            self.b, self.c_old, self.c_new = self.c_old, self.q, None
        else:
            self.b, self.c_old = self.c_old, self.r

    def _insert(self, p: TimedPoint) -> None:
        g = self.gamma
        x = p.point
        if self.c_new is None:
            if math.dist(x, self.r.point) > g:
                self.c_old = self.q = self.r
                self.c_new = p
            elif math.dist(x, self.c_old.point) > g:
                self.q = self.r
                self.c_new = p
        elif math.dist(x, self.r.point) > g:
            self.c_old = self.q = self.r
            self.c_new = p
        elif math.dist(x, self.c_new.point) > g:
            self.c_old, self.q, self.c_new = self.c_new, self.r, p
        elif math.dist(x, self.q.point) > g and self.c_old != self.q:
            self.c_old, self.q, self.c_new = self.q, self.r, p

    def update(self, p: TimedPoint, window_size: int) -> "DiameterSketch":
        if p.time <= self.r.time:
            raise RejectedInput(f"arrival at time {p.time} after time {self.r.time}")
        self._expire(p.time, window_size)
        self._insert(p)
        self.r = p
        return self

    def path_distances(self, p: TimedPoint, window_size: int, far) -> List[float]:
        """Distances the next update compares when ``far(d)`` stands in for ``d > gamma``.

        ``far = lambda d: d > 0`` follows the path shared by every small
        estimate, ``lambda d: False`` the path shared by every large one.
        """
        s = self.copy()
        s._expire(p.time, window_size)
        x = p.point
        seen = [math.dist(x, s.r.point)]
        if far(seen[-1]):
            return seen
        if s.c_new is None:
            seen.append(math.dist(x, s.c_old.point))
            return seen
        seen.append(math.dist(x, s.c_new.point))
        if far(seen[-1]):
            return seen
        if s.c_old != s.q:
            seen.append(math.dist(x, s.q.point))
        return seen

    def answer(self) -> OneCenterAnswer:
        if self.c_new is not None:
            return OneCenterAnswer(TWO_POINTS, pair=(self.c_old, self.c_new))
        return OneCenterAnswer(
            ONE_CENTER, ball=Ball(midpoint(self.c_old.point, self.b.point), 1.5 * self.gamma)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiameterSketch):
            return NotImplemented
        return self.gamma == other.gamma and self.state() == other.state()

    def __repr__(self) -> str:
        return (
            f"DiameterSketch(gamma={self.gamma!r}, c_old={self.c_old}, c_new={self.c_new}, "
            f"q={self.q}, r={self.r}, b={self.b})"
        )


def sketch_new(gamma: float, first: TimedPoint) -> DiameterSketch:
    return DiameterSketch.new(gamma, first)


def sketch_update(s: DiameterSketch, p: TimedPoint, clock: WindowClock) -> DiameterSketch:
    if p.time != clock.now:
        raise RejectedInput("sketch updates must use the clock's current arrival")
    return s.update(p, clock.window_size)


def sketch_answer(s: DiameterSketch) -> OneCenterAnswer:
    return s.answer()


def witness_init_low(gamma: float, p_prev: TimedPoint, p_last: TimedPoint) -> DiameterSketch:
    return DiameterSketch.witness_low(gamma, p_prev, p_last)


def witness_init_high(gamma: float, p_prev: TimedPoint) -> DiameterSketch:
    return DiameterSketch.witness_high(gamma, p_prev)


class GammaLadder:
    """Estimate ladder over the grid ``(1+epsilon)**i`` for the 1-center problem.

    Grid indices are covered by segments ``[start, next_start)``; every index
    in a segment has the same sketch state, so one stored sketch serves the
    whole segment. The lowest segment extends to ``-inf`` and the highest to
    ``+inf``. The guarantee is radius <= 3*(1+epsilon)*r*, so callers after a
    3+e factor should pass ``epsilon = e/3``.
    """

    # Segments above HEADROOM * gamma_e are folded into one when the ladder
    # outgrows the index span it needs.
    HEADROOM = 6.0

    def __init__(self, epsilon: float, window_size: int) -> None:
        self.grid = Grid(epsilon)
        self.window_size = window_size
        self.clock = WindowClock(window_size)
        self.starts: List[int] = []  # starts[0] is unused: the floor reaches -inf
        self.states: List[DiameterSketch] = []
        self.e_idx: Optional[int] = None
        self.prev: Optional[TimedPoint] = None
        self.last: Optional[TimedPoint] = None
        self.last_change = 0

    @property
    def epsilon(self) -> float:
        return self.grid.epsilon

    @property
    def floor_idx(self) -> Optional[int]:
        return self.starts[1] - 1 if len(self.starts) > 1 else None

    @property
    def gamma_L(self) -> Optional[float]:
        i = self.floor_idx
        return None if i is None else self.grid.value(i)

    @property
    def gamma_e(self) -> Optional[float]:
        return None if self.e_idx is None else self.grid.value(self.e_idx)

    @property
    def gamma_U(self) -> Optional[float]:
        """Smallest grid value at least three times the current answer."""
        if self.e_idx is None:
            return None
        return self.grid.value(self.grid.index_at_least(3.0 * self.gamma_e))

    @property
    def size(self) -> int:
        """Number of stored sketch states."""
        return len(self.states)

    def state_at(self, i: int) -> DiameterSketch:
        j = bisect_right(self.starts, i, lo=1) - 1
        return self.states[j].copy(self.grid.value(i))

    def degenerate(self) -> bool:
        """True when every alive point coincides (or at most one point is alive)."""
        # Every arrival from last_change on equals its predecessor; 0 means no change yet.
        return self.last_change == 0 or self.last_change <= self.clock.now - self.window_size + 1

    def ingest(self, x) -> TimedPoint:
        p = self.clock.advance(tuple(x))
        self.update(p)
        return p

    def _gamma(self, a: Optional[int], b: Optional[int]) -> float:
        # Any index of a uniform segment behaves the same; prefer its start.
        if a is not None:
            return self.grid.value(a)
        if b is not None:
            return self.grid.value(b)
        return 1.0

    def update(self, p: TimedPoint) -> None:
        if self.last is not None and p.time != self.last.time + 1:
            raise RejectedInput(f"expected arrival {self.last.time + 1}, got {p.time}")
        if self.clock.now < p.time:
            self.clock.now = p.time
        n_win = self.window_size
        grid = self.grid
        prev, self.prev, self.last = self.last, self.last, p
        if prev is None:
            self.starts, self.states = [0], [DiameterSketch.new(1.0, p)]
            return
        if p.point != prev.point:
            self.last_change = p.time

        starts: List[int] = []
        states: List[DiameterSketch] = []
        m = len(self.states)
        for j, st in enumerate(self.states):
            a = self.starts[j] if j > 0 else None
            b = self.starts[j + 1] - 1 if j + 1 < m else None
            cuts = set()
            for d in st.path_distances(p, n_win, lambda d: d > 0.0):
                if d > 0.0:
                    cuts.add(grid.index_below(d))
            for d in st.path_distances(p, n_win, lambda d: False):
                if d > 0.0:
                    cuts.add(grid.index_below(d))
            pieces = [a] + sorted(
                c + 1 for c in cuts if (a is None or c >= a) and (b is None or c < b)
            )
            for k, lo in enumerate(pieces):
                hi = pieces[k + 1] - 1 if k + 1 < len(pieces) else b
                nxt = st.copy(self._gamma(lo, hi)).update(p, n_win)
                if states and states[-1].state() == nxt.state():
                    continue
                starts.append(lo if lo is not None else 0)
                states.append(nxt)

        if p.point != prev.point:
            # Every estimate below the consecutive distance is in the low witness state.
            cand = grid.index_below(math.dist(prev.point, p.point))
            j = bisect_right(starts, cand + 1, lo=1) - 1
            low = DiameterSketch.witness_low(grid.value(cand), prev, p)
            new_starts, new_states = [0], [low]
            if j == 0 or starts[j] <= cand:
                if states[j].state() != low.state():
                    new_starts.append(cand + 1)
                    new_states.append(states[j])
                j += 1
            for start, st in zip(starts[j:], states[j:]):
                if st.state() != new_states[-1].state():
                    new_starts.append(start)
                    new_states.append(st)
            starts, states = new_starts, new_states

        self.starts, self.states = starts, states
        self._refresh()

    def _refresh(self) -> None:
        self.e_idx = None
        for j in range(1, len(self.states)):
            if self.states[j].c_new is None:
                self.e_idx = self.starts[j]
                break
        if self.e_idx is None:
            return
        cap = self.grid.index_at_least(self.HEADROOM * self.gamma_e)
        if len(self.states) > cap - self.floor_idx + 2:
            cut = bisect_right(self.starts, cap, lo=1)
            del self.starts[cut:], self.states[cut:]

    def answer(self) -> Ball:
        if self.last is None:
            raise RejectedQuery("no point has been ingested")
        if self.degenerate() or self.e_idx is None:
            return Ball(self.last.point, 0.0)
        return self.state_at(self.e_idx).answer().ball

    def baseline(self) -> Ball:
        """Diameter-pair baseline: ball around the later point of the pair.

        Uses the largest estimate that still reports two points; the radius
        is ``3*(1+epsilon)*|pq|`` so that the ball covers the window.
        """
        if self.last is None:
            raise RejectedQuery("no point has been ingested")
        if self.degenerate():
            return Ball(self.last.point, 0.0)
        pair = None
        for st in self.states:
            if st.c_new is not None:
                pair = (st.c_old, st.c_new)
        if pair is None:
            return Ball(self.last.point, 0.0)
        p, q = pair
        later = q if q.time > p.time else p
        return Ball(later.point, 3.0 * self.grid.base * math.dist(p.point, q.point))


def ladder_update(ladder: GammaLadder, p: TimedPoint, clock: WindowClock) -> GammaLadder:
    if p.time != clock.now:
        raise RejectedInput("ladder updates must use the clock's current arrival")
    ladder.update(p)
    return ladder


def ladder_answer(ladder: GammaLadder) -> Ball:
    return ladder.answer()


def baseline_6eps(ladder: GammaLadder) -> Ball:
    return ladder.baseline()
