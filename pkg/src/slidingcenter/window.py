"""Stream time, sliding-window membership and point ingestion."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import IO, Iterator, Optional, Union

from .exceptions import ParseError, RejectedInput
from .geometry import Point, as_point


@dataclass(frozen=True)
class TimedPoint:
    point: Point
    time: int


class WindowClock:
    """Arrival counter for a count-based window over the last ``window_size`` points."""

    def __init__(self, window_size: int, now: int = 0) -> None:
        if window_size < 1:
            raise RejectedInput("window size must be at least 1")
        if now < 0:
            raise RejectedInput("clock time cannot be negative")
        self.window_size = window_size
        self.now = now
        self.dim: Optional[int] = None

    def advance(self, p: Point) -> TimedPoint:
        p = as_point(p)
        if self.dim is None:
            self.dim = len(p)
        elif len(p) != self.dim:
            raise RejectedInput(f"point of dimension {len(p)} in a {self.dim}-dimensional stream")
        self.now += 1
        return TimedPoint(p, self.now)

    def is_alive(self, t: int) -> bool:
        if t > self.now:
            raise RejectedInput(f"time {t} is in the future (now={self.now})")
        return t > self.now - self.window_size

    @property
    def alive_count(self) -> int:
        return min(self.now, self.window_size)

    @property
    def oldest_alive(self) -> int:
        return max(1, self.now - self.window_size + 1)


def advance(clock: WindowClock, p: Point) -> TimedPoint:
    return clock.advance(p)


def is_alive(clock: WindowClock, t: int) -> bool:
    return clock.is_alive(t)


def _lines(source: Union[IO[str], IO[bytes]]) -> Iterator[str]:
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def parse_stream(source: Union[IO[str], IO[bytes]], fmt: str = "csv") -> Iterator[Point]:
    """Yield points lazily from a CSV or NDJSON stream.

    CSV: one point per line, comma-separated coordinates, no header.
    NDJSON: one object per line with the coordinates under ``"x"``.
    Blank lines are skipped. The first record fixes the dimension.
    """
    if fmt not in ("csv", "ndjson"):
        raise RejectedInput(f"unknown input format {fmt!r}")
    dim = None
    for lineno, line in enumerate(_lines(source), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            if fmt == "csv":
                fields = next(csv.reader(io.StringIO(text)))
                p = as_point(f.strip() for f in fields)
            else:
                record = json.loads(text)
                if not isinstance(record, dict) or not isinstance(record.get("x"), list):
                    raise ParseError(lineno, 'expected an object with an array field "x"')
                if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in record["x"]):
                    raise ParseError(lineno, '"x" must hold numbers only')
                p = as_point(record["x"])
        except ParseError:
            raise
        except (RejectedInput, ValueError) as exc:
            raise ParseError(lineno, str(exc)) from exc
        if dim is None:
            dim = len(p)
        elif len(p) != dim:
            raise ParseError(lineno, f"dimension changed from {dim} to {len(p)}")
        yield p
