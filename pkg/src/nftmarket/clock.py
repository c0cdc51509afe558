"""Injectable clock so blocks and challenges are reproducible in tests."""

import time


class Clock:
    def now(self) -> float:
        """Seconds since epoch."""
        raise NotImplementedError


class SystemClock(Clock):
    def now(self) -> float:
        return time.time()


class FixedClock(Clock):
    """Manually advanced clock for deterministic tests."""

    def __init__(self, start: float = 0.0):
        self._t = float(start)

    def now(self) -> float:
        return self._t

    def advance(self, seconds: float) -> None:
        self._t += seconds
