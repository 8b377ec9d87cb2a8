"""Geometric estimate grid ``(1+eps)**i`` anchored at 1."""

from __future__ import annotations

import math

from .exceptions import RejectedInput


class Grid:
    def __init__(self, epsilon: float) -> None:
        if not epsilon > 0:
            raise RejectedInput("epsilon must be positive")
        self.epsilon = epsilon
        self.base = 1.0 + epsilon
        self._log_base = math.log(self.base)

    def value(self, i: int) -> float:
        return self.base ** i

    def _guess(self, x: float) -> int:
        return math.floor(math.log(x) / self._log_base)

    def index_below(self, x: float) -> int:
        """Largest i with value(i) < x (x > 0)."""
        i = self._guess(x)
        while self.value(i) >= x:
            i -= 1
        while self.value(i + 1) < x:
            i += 1
        return i

    def index_at_least(self, x: float) -> int:
        """Smallest i with value(i) >= x (x > 0)."""
        i = self._guess(x)
        while self.value(i) < x:
            i += 1
        while self.value(i - 1) >= x:
            i -= 1
        return i
