"""Sliding-window 1-center and k-center in Euclidean space."""

from .exceptions import ParseError, RejectedInput, RejectedQuery, SnapshotError
from .geometry import Ball, contains, distance, midpoint
from .harness import QueryRecord, RunConfig, Session, gen_stream, run
from .k_center import CoresetSketch, KCenterSolution, LowDimConfig, RLadder, lowdim_factor
from .one_center import DiameterSketch, GammaLadder
from .window import TimedPoint, WindowClock, parse_stream

__all__ = [
    "Ball",
    "CoresetSketch",
    "DiameterSketch",
    "GammaLadder",
    "KCenterSolution",
    "LowDimConfig",
    "ParseError",
    "QueryRecord",
    "RLadder",
    "RejectedInput",
    "RejectedQuery",
    "RunConfig",
    "Session",
    "SnapshotError",
    "TimedPoint",
    "WindowClock",
    "contains",
    "distance",
    "gen_stream",
    "lowdim_factor",
    "midpoint",
    "parse_stream",
    "run",
]
