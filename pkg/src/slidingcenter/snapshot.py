"""Versioned JSON encoding of ladder state.

Floats are written with ``repr`` and read back with ``float``, which round-trips
every finite double exactly, so a restored ladder continues bit-identically.
"""

from __future__ import annotations

from collections import deque
from typing import Any, Dict, Optional

from .exceptions import SnapshotError
from .k_center import CoresetSketch, LowDimConfig, RLadder
from .one_center import DiameterSketch, GammaLadder
from .window import TimedPoint, WindowClock

FORMAT_VERSION = 1


def _f(x: float) -> str:
    return repr(float(x))


def _tp(p: Optional[TimedPoint]):
    if p is None:
        return None
    return [str(p.time), [_f(c) for c in p.point]]


def _untp(obj) -> Optional[TimedPoint]:
    if obj is None:
        return None
    time, coords = obj
    return TimedPoint(tuple(float(c) for c in coords), int(time))


def _clock(c: WindowClock) -> Dict[str, Any]:
    return {"window": c.window_size, "now": c.now, "dim": c.dim}


def _unclock(d) -> WindowClock:
    c = WindowClock(int(d["window"]), int(d["now"]))
    c.dim = d["dim"]
    return c


def encode_diameter(s: DiameterSketch) -> Dict[str, Any]:
    return {
        "gamma": _f(s.gamma),
        "c_old": _tp(s.c_old),
        "c_new": _tp(s.c_new),
        "q": _tp(s.q),
        "r": _tp(s.r),
        "b": _tp(s.b),
    }


def decode_diameter(d) -> DiameterSketch:
    return DiameterSketch(
        float(d["gamma"]),
        _untp(d["c_old"]),
        _untp(d["c_new"]),
        _untp(d["q"]),
        _untp(d["r"]),
        _untp(d["b"]),
    )


def encode_gamma_ladder(L: GammaLadder) -> Dict[str, Any]:
    return {
        "epsilon": _f(L.epsilon),
        "clock": _clock(L.clock),
        "starts": list(L.starts),
        "states": [encode_diameter(s) for s in L.states],
        "e_idx": L.e_idx,
        "prev": _tp(L.prev),
        "last": _tp(L.last),
        "last_change": L.last_change,
    }


def decode_gamma_ladder(d) -> GammaLadder:
    clock = _unclock(d["clock"])
    L = GammaLadder(float(d["epsilon"]), clock.window_size)
    L.clock = clock
    L.starts = [int(i) for i in d["starts"]]
    L.states = [decode_diameter(s) for s in d["states"]]
    if len(L.starts) != len(L.states):
        raise SnapshotError("segment starts do not match stored states")
    L.e_idx = d["e_idx"]
    L.prev = _untp(d["prev"])
    L.last = _untp(d["last"])
    L.last_change = int(d["last_change"])
    return L


def encode_coreset(s: CoresetSketch) -> Dict[str, Any]:
    return {
        "r": _f(s.r),
        "k": s.k,
        "capacity": s.capacity,
        "threshold": _f(s.threshold),
        "A": [_tp(a) for a in s.A],
        "reps": [_tp(s.reps[a.time]) for a in s.A],
        "orphans": [_tp(x) for x in s.orphans],
        "FT": s.FT,
        "CT": s.CT,
    }


def decode_coreset(d) -> CoresetSketch:
    s = CoresetSketch(float(d["r"]), int(d["k"]), int(d["capacity"]), float(d["threshold"]))
    s.A = [_untp(a) for a in d["A"]]
    if len(d["reps"]) != len(s.A):
        raise SnapshotError("representative list does not match active centers")
    s.reps = {a.time: _untp(rep) for a, rep in zip(s.A, d["reps"])}
    s.orphans = [_untp(x) for x in d["orphans"]]
    s.FT = int(d["FT"])
    s.CT = int(d["CT"])
    return s


def encode_rladder(L: RLadder) -> Dict[str, Any]:
    return {
        "k": L.k,
        "epsilon": _f(L.epsilon),
        "t": L.cfg.t,
        "doubling_exponent": None if L.cfg.doubling_exponent is None else _f(L.cfg.doubling_exponent),
        "clock": _clock(L.clock),
        "companion": encode_gamma_ladder(L.companion),
        "owns_companion": L._owns_companion,
        "dim": L.dim,
        "capacity": L.capacity,
        "starts": list(L.starts),
        "states": [encode_coreset(s) for s in L.states],
        "hi_idx": L.hi_idx,
        "recent": [_tp(x) for x in L.recent],
        "prev": _tp(L.prev),
        "last": _tp(L.last),
    }


def decode_rladder(d) -> RLadder:
    de = d["doubling_exponent"]
    cfg = LowDimConfig(int(d["t"]), None if de is None else float(de))
    clock = _unclock(d["clock"])
    L = RLadder(int(d["k"]), float(d["epsilon"]), clock.window_size, cfg, decode_gamma_ladder(d["companion"]))
    L._owns_companion = bool(d["owns_companion"])
    L.clock = clock
    L.dim = d["dim"]
    L.capacity = int(d["capacity"])
    L.starts = [int(i) for i in d["starts"]]
    L.states = [decode_coreset(s) for s in d["states"]]
    if len(L.starts) != len(L.states):
        raise SnapshotError("segment starts do not match stored states")
    L.hi_idx = d["hi_idx"]
    L.recent = deque((_untp(x) for x in d["recent"]), maxlen=L.capacity + 1 if L.capacity else None)
    L.prev = _untp(d["prev"])
    L.last = _untp(d["last"])
    return L


def check_version(payload: Dict[str, Any]) -> None:
    if not isinstance(payload, dict) or "version" not in payload:
        raise SnapshotError("snapshot has no version field")
    if payload["version"] != FORMAT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {payload['version']!r}")

