"""Time sources for scenario execution.

Both clocks count seconds from their own origin. A virtual clock only moves
when the executor advances it; with a speedup it also paces itself so that
virtual time never runs more than ``speedup`` times ahead of the wall clock.
"""

import threading
import time
from typing import Optional, Protocol, Tuple

from .exceptions import ClockConfigException


class Clock(Protocol):
    virtual: bool

    def now(self) -> float:
        """Seconds since the clock's origin."""

    def sleep_until(self, instant: float) -> None:
        """Return no earlier than ``instant``."""


class RealClock:
    virtual = False

    def __init__(self):
        self._origin = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._origin

    def sleep_until(self, instant: float) -> None:
        delay = instant - self.now()
        if delay > 0:
            time.sleep(delay)


class VirtualClock:
    """Deterministic simulated time; ``speedup=None`` runs unpaced.

    Pacing starts at the first advance, so setup work done before the
    scenario runs does not count against the speedup.
    """

    virtual = True

    def __init__(self, speedup: Optional[float] = None):
        if speedup is not None and speedup < 1:
            raise ClockConfigException(speedup)
        self.speedup = speedup
        self._now = 0.0
        self._anchor: Optional[Tuple[float, float]] = None  # (wall, virtual) at the first advance
        self._lock = threading.Lock()

    def now(self) -> float:
        return self._now

    def advance_to(self, instant: float) -> None:
        with self._lock:
            if self._anchor is None:
                self._anchor = (time.monotonic(), self._now)
            if instant > self._now:
                self._now = instant
        if self.speedup is not None:
            wall_origin, virtual_origin = self._anchor
            lag = (self._now - virtual_origin) / self.speedup - (time.monotonic() - wall_origin)
            if lag > 0:
                time.sleep(lag)

    def advance(self, seconds: float) -> None:
        self.advance_to(self._now + seconds)

    sleep_until = advance_to


def virtual_clock(speedup: Optional[float] = None) -> VirtualClock:
    return VirtualClock(speedup)
