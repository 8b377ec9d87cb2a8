"""Points, balls and elementary Euclidean predicates.

Points are plain tuples of floats so that distance evaluation stays in C
(``math.dist``) on the per-arrival hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

from .exceptions import RejectedInput

Point = Tuple[float, ...]

# Relative/absolute slack used by every containment check in the package.
TOLERANCE = 1e-9


def as_point(coords: Iterable[float]) -> Point:
    """Validate ``coords`` and return them as an immutable point."""
    raw = list(coords)
    try:
        p = tuple(float(c) for c in raw)
    except (TypeError, ValueError) as exc:
        raise RejectedInput(f"non-numeric coordinate in {raw!r}") from exc
    if not p:
        raise RejectedInput("a point needs at least one coordinate")
    if not all(math.isfinite(c) for c in p):
        raise RejectedInput(f"non-finite coordinate in {p!r}")
    return p


def _check_dims(p: Sequence[float], q: Sequence[float]) -> None:
    if len(p) != len(q):
        raise RejectedInput(f"dimension mismatch: {len(p)} vs {len(q)}")


def distance(p: Point, q: Point) -> float:
    _check_dims(p, q)
    return math.dist(p, q)


def midpoint(p: Point, q: Point) -> Point:
    _check_dims(p, q)
    return tuple((a + b) / 2.0 for a, b in zip(p, q))


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not self.radius >= 0.0:
            raise RejectedInput(f"ball radius must be non-negative, got {self.radius}")

    @property
    def dim(self) -> int:
        return len(self.center)


def contains(ball: Ball, p: Point, tol: float = TOLERANCE) -> bool:
    """True iff ``p`` lies in ``ball`` up to ``radius*(1+tol) + tol``."""
    if tol < 0:
        raise RejectedInput("tolerance must be non-negative")
    return distance(ball.center, p) <= ball.radius * (1.0 + tol) + tol
