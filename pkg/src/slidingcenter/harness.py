"""Run configuration, query scheduling, oracle metrics and stream generators."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import IO, Any, Deque, Dict, Iterable, Iterator, List, Optional, Sequence, Union

import numpy as np

from .exceptions import RejectedInput, SnapshotError
from .geometry import TOLERANCE, Ball, Point, contains
from .k_center import EXACT_C1, GREEDY_C2, SOLVERS, LowDimConfig, RLadder
from .one_center import GammaLadder
from .oracles import EXACT_K_CENTER_CAP, exact_k_center, greedy_2approx_k_center, min_enclosing_ball
from . import snapshot as snap
from .window import parse_stream

ONE_CENTER = "one_center"
K_CENTER = "k_center"
DIAMETER_BASELINE = "diameter_baseline"
MODES = (ONE_CENTER, K_CENTER, DIAMETER_BASELINE)
STREAM_KINDS = ("uniform_ball", "gaussian_clusters", "drifting", "duplicate_heavy")


@dataclass(frozen=True)
class RunConfig:
    mode: str = ONE_CENTER
    window_size: int = 100
    k: int = 1
    epsilon: float = 0.1
    lowdim_t: int = 0
    doubling_exponent: Optional[float] = None
    solver: str = GREEDY_C2
    query_every: int = 1
    oracle_checks: bool = False
    tolerance: float = TOLERANCE
    input_format: str = "csv"
    seed: int = 0

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise RejectedInput(f"mode must be one of {', '.join(MODES)}")
        if self.window_size < 1:
            raise RejectedInput("window size must be at least 1")
        if self.k < 1:
            raise RejectedInput("k must be at least 1")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise RejectedInput("epsilon must be positive")
        if self.lowdim_t < 0:
            raise RejectedInput("t must be non-negative")
        if self.doubling_exponent is not None and not self.doubling_exponent > 0:
            raise RejectedInput("doubling exponent must be positive")
        if self.solver not in SOLVERS:
            raise RejectedInput(f"solver must be one of {', '.join(SOLVERS)}")
        if self.query_every < 1:
            raise RejectedInput("query_every must be at least 1")
        if not self.tolerance > 0:
            raise RejectedInput("tolerance must be positive")
        if self.input_format not in ("csv", "ndjson"):
            raise RejectedInput("format must be csv or ndjson")
        return self


@dataclass
class QueryRecord:
    at_time: int
    radius: float
    centers: List[List[float]]
    ladder_size: int
    oracle_radius: Optional[float] = None
    ratio: Optional[float] = None
    coreset_size: Optional[int] = None
    feasible_r: Optional[float] = None
    fell_back: Optional[bool] = None
    oracle_exact: Optional[bool] = None
    covered: Optional[bool] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


def oracle_radius(points: Sequence[Point], mode: str, k: int) -> "tuple[float, bool]":
    """Optimal radius of the window, and whether it is exact."""
    distinct = list(dict.fromkeys(points))
    if mode != K_CENTER or k == 1:
        return min_enclosing_ball(distinct).radius, True
    if len(distinct) <= k:
        return 0.0, True
    if len(distinct) <= EXACT_K_CENTER_CAP:
        return exact_k_center(distinct, k).radius, True
    return greedy_2approx_k_center(distinct, k).radius, False


class Session:
    """Feeds one stream through the configured ladder and schedules queries."""

    def __init__(self, cfg: RunConfig) -> None:
        self.cfg = cfg.validate()
        self.ladder: Union[GammaLadder, RLadder]
        if cfg.mode == K_CENTER:
            self.ladder = RLadder(
                cfg.k, cfg.epsilon, cfg.window_size, LowDimConfig(cfg.lowdim_t, cfg.doubling_exponent)
            )
        else:
            self.ladder = GammaLadder(cfg.epsilon, cfg.window_size)
        # Test-only copy of the window, never read by the ladder.
        self.buffer: Deque[Point] = deque(maxlen=cfg.window_size)
        self.max_size = 0

    @property
    def now(self) -> int:
        return self.ladder.clock.now

    def push(self, x: Iterable[float]) -> Optional[QueryRecord]:
        self.ladder.ingest(tuple(x))
        if self.cfg.oracle_checks:
            self.buffer.append(tuple(x))
        self.max_size = max(self.max_size, self.ladder.size)
        if self.now % self.cfg.query_every == 0:
            return self.query()
        return None

    def answer(self) -> "tuple[List[Ball], Dict[str, Any]]":
        mode = self.cfg.mode
        if mode == ONE_CENTER:
            return [self.ladder.answer()], {}
        if mode == DIAMETER_BASELINE:
            return [self.ladder.baseline()], {}
        sol = self.ladder.solve(self.cfg.solver)
        extra = {"coreset_size": sol.coreset_size, "feasible_r": sol.r_used, "fell_back": sol.fell_back}
        return sol.balls, extra

    def query(self) -> QueryRecord:
        balls, extra = self.answer()
        rec = QueryRecord(
            at_time=self.now,
            radius=max(b.radius for b in balls),
            centers=[list(b.center) for b in balls],
            ladder_size=self.ladder.size,
            **extra,
        )
        if self.cfg.oracle_checks:
            pts = list(self.buffer)
            opt, exact = oracle_radius(pts, self.cfg.mode, self.cfg.k)
            rec.oracle_radius = opt
            rec.oracle_exact = exact
            if opt > 0:
                rec.ratio = rec.radius / opt
            tol = self.cfg.tolerance
            rec.covered = all(any(contains(b, p, tol) for b in balls) for p in pts)
        return rec

    # -- snapshots --------------------------------------------------------

    def snapshot(self) -> bytes:
        if isinstance(self.ladder, RLadder):
            ladder = {"kind": "rladder", "state": snap.encode_rladder(self.ladder)}
        else:
            ladder = {"kind": "gamma", "state": snap.encode_gamma_ladder(self.ladder)}
        cfg = asdict(self.cfg)
        cfg["epsilon"] = repr(cfg["epsilon"])
        cfg["tolerance"] = repr(cfg["tolerance"])
        if cfg["doubling_exponent"] is not None:
            cfg["doubling_exponent"] = repr(cfg["doubling_exponent"])
        payload = {
            "version": snap.FORMAT_VERSION,
            "config": cfg,
            "ladder": ladder,
            "buffer": [[repr(c) for c in p] for p in self.buffer],
            "max_size": self.max_size,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def restore(cls, data: bytes) -> "Session":
        try:
            payload = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SnapshotError(f"corrupt snapshot: {exc}") from exc
        snap.check_version(payload)
        try:
            cfg = dict(payload["config"])
            for key in ("epsilon", "tolerance", "doubling_exponent"):
                if cfg[key] is not None:
                    cfg[key] = float(cfg[key])
            session = cls(RunConfig(**cfg))
            kind = payload["ladder"]["kind"]
            state = payload["ladder"]["state"]
            if kind == "rladder":
                session.ladder = snap.decode_rladder(state)
            elif kind == "gamma":
                session.ladder = snap.decode_gamma_ladder(state)
            else:
                raise SnapshotError(f"unknown ladder kind {kind!r}")
            session.buffer.extend(tuple(float(c) for c in p) for p in payload["buffer"])
            session.max_size = int(payload["max_size"])
        except SnapshotError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SnapshotError(f"corrupt snapshot: {exc!r}") from exc
        return session


def run(
    cfg: RunConfig, source: Union[IO[str], IO[bytes]], session: Optional[Session] = None
) -> Iterator[QueryRecord]:
    """Ingest a CSV/NDJSON stream and yield a record every ``query_every`` arrivals."""
    cfg.validate()
    session = session if session is not None else Session(cfg)
    for x in parse_stream(source, cfg.input_format):
        rec = session.push(x)
        if rec is not None:
            yield rec


def run_points(cfg: RunConfig, points: Iterable[Sequence[float]], session: Optional[Session] = None):
    session = session if session is not None else Session(cfg)
    for x in points:
        rec = session.push(x)
        if rec is not None:
            yield rec


# -- stream generators ----------------------------------------------------

_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "uniform_ball": {"n": 1000, "d": 2, "radius": 1.0},
    "gaussian_clusters": {"n": 1000, "d": 2, "clusters": 3, "spread": 1.0, "separation": 20.0},
    "drifting": {"n": 1000, "d": 2, "speed": 0.05, "noise": 1.0},
    "duplicate_heavy": {"n": 1000, "d": 2, "repeat": 0.5, "scale": 1.0},
}


def _uniform_ball(rng: np.random.Generator, n: int, d: int, radius: float) -> np.ndarray:
    directions = rng.normal(size=(n, d))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    scale = radius * rng.random((n, 1)) ** (1.0 / d)
    pts = directions / norms * scale
    # Guard against rounding pushing a point past the boundary.
    over = np.linalg.norm(pts, axis=1) > radius
    pts[over] *= radius / np.linalg.norm(pts[over], axis=1, keepdims=True) * (1 - 1e-15)
    return pts


def gen_stream(kind: str, params: Optional[Dict[str, Any]] = None, seed: int = 0) -> List[Point]:
    """Deterministic synthetic stream of ``n`` points in ``d`` dimensions."""
    if kind not in _DEFAULTS:
        raise RejectedInput(f"unknown stream kind {kind!r}")
    unknown = set(params or {}) - set(_DEFAULTS[kind])
    if unknown:
        raise RejectedInput(f"unknown parameters for {kind}: {', '.join(sorted(unknown))}")
    p = {**_DEFAULTS[kind], **(params or {})}
    n, d = int(p["n"]), int(p["d"])
    if n < 0 or d < 1:
        raise RejectedInput("need n >= 0 and d >= 1")
    rng = np.random.default_rng(seed)

    if kind == "uniform_ball":
        if not p["radius"] > 0:
            raise RejectedInput("radius must be positive")
        pts = _uniform_ball(rng, n, d, float(p["radius"]))
    elif kind == "gaussian_clusters":
        c = int(p["clusters"])
        if c < 1 or not p["spread"] > 0:
            raise RejectedInput("need clusters >= 1 and spread > 0")
        means = rng.normal(size=(c, d)) * float(p["separation"])
        labels = rng.integers(0, c, size=n)
        pts = means[labels] + rng.normal(size=(n, d)) * float(p["spread"])
    elif kind == "drifting":
        if not p["noise"] > 0:
            raise RejectedInput("noise must be positive")
        heading = rng.normal(size=d)
        heading /= np.linalg.norm(heading) or 1.0
        steps = np.arange(n)[:, None] * float(p["speed"]) * heading
        pts = steps + rng.normal(size=(n, d)) * float(p["noise"])
    else:
        q = float(p["repeat"])
        if not 0.0 <= q < 1.0 or not p["scale"] > 0:
            raise RejectedInput("need 0 <= repeat < 1 and scale > 0")
        # Coarse coordinates plus exact repeats of the previous point.
        fresh = np.round(rng.uniform(-1, 1, size=(n, d)) * 10) / 10 * float(p["scale"])
        repeat = rng.random(n) < q
        pts = fresh.copy()
        for i in range(1, n):
            if repeat[i]:
                pts[i] = pts[i - 1]
    return [tuple(float(v) for v in row) for row in pts]


def write_csv(points: Iterable[Sequence[float]], out: IO[str]) -> None:
    for p in points:
        out.write(",".join(repr(float(v)) for v in p) + "\n")
