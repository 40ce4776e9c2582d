"""Work accounting for modeled service times.

Backend operations report the articles they touch and the bytes they move to
the meter active in the current context. Under a virtual clock the scenario
executor turns a meter reading into a duration through a :class:`CostModel`.
"""

from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional

from pydantic import BaseModel, Field

_current_meter: ContextVar[Optional["WorkMeter"]] = ContextVar("primeball_work_meter", default=None)


class WorkMeter:
    """Counters for one metered operation."""

    __slots__ = ("articles", "bytes", "operations")

    def __init__(self):
        self.articles = 0
        self.bytes = 0
        self.operations = 0

    def add(self, articles: int = 0, bytes: int = 0) -> None:
        self.articles += articles
        self.bytes += bytes
        self.operations += 1

    def __repr__(self) -> str:
        return f"WorkMeter(articles={self.articles}, bytes={self.bytes}, operations={self.operations})"


def record_work(articles: int = 0, bytes: int = 0) -> None:
    meter = _current_meter.get()
    if meter is not None:
        meter.add(articles=articles, bytes=bytes)


@contextmanager
def metered() -> Iterator[WorkMeter]:
    """Collect the work done inside the block."""
    meter = WorkMeter()
    token = _current_meter.set(meter)
    try:
        yield meter
    finally:
        _current_meter.reset(token)


class CostModel(BaseModel):
    """Service time of an operation from the work it did.

    ``base_latency + articles * per_article / live_nodes + bytes / (bandwidth * live_nodes)``
    """

    base_latency_s: float = Field(default=0.002, ge=0)
    per_article_s: float = Field(default=0.0002, ge=0)
    bandwidth_bytes_per_s: float = Field(default=50 * 2 ** 20, gt=0)

    def duration(self, meter: WorkMeter, live_nodes: int) -> float:
        nodes = max(1, live_nodes)
        return (
            self.base_latency_s
            + meter.articles * self.per_article_s / nodes
            + meter.bytes / (self.bandwidth_bytes_per_s * nodes)
        )
