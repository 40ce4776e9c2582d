"""Workers and the two ways of executing them.

A worker is a generator of :class:`PlannedOperation` values. After each
operation the executor sends the operation's end time back into the
generator, so a worker can pace itself against its own completions.

The virtual executor is a discrete-event simulation: operations run one at a
time in ``(scheduled time, worker index, sequence)`` order, their effects
happen at their start instant and their duration comes from the cost model.
The realtime executor gives each worker its own thread.
"""

import heapq
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Generator, List, NamedTuple, Optional, Sequence, Tuple

from ..backend.interface import BackendInterface
from ..backend.meter import CostModel, WorkMeter, metered
from ..exceptions import PrimeballException
from ..logging_config import LoggingMixin
from .clock import RealClock, VirtualClock
from .exceptions import ScenarioAbortedException
from .models import OperationRecord


class Observation(NamedTuple):
    """What an operation saw; the executor adds timing and work."""

    outcome: str = "ok"
    success: bool = True
    version: Optional[int] = None
    served_sequence: Optional[int] = None
    committed_at: Optional[float] = None
    rows: Optional[int] = None
    flags: Tuple[str, ...] = ()


class PlannedOperation(NamedTuple):
    at: float
    kind: str
    key: Optional[str]
    action: Callable[[float], Observation]  # receives the start instant
    repetition: int = 0


Plan = Generator[PlannedOperation, float, None]


class Worker(NamedTuple):
    name: str
    plan: Plan


def _perform(worker: str, op: PlannedOperation, start: float) -> Tuple[Observation, WorkMeter]:
    with metered() as meter:
        try:
            observation = op.action(start)
        except PrimeballException as e:
            observation = Observation(outcome=e.error_class, success=False)
        except Exception as e:
            raise ScenarioAbortedException(worker, f"{op.kind} {op.key or ''}: {e!r}".strip()) from e
    return observation, meter


def _record(worker: str, sequence: int, op: PlannedOperation, start: float, end: float,
            observation: Observation, meter: WorkMeter) -> OperationRecord:
    return OperationRecord(
        worker=worker,
        sequence=sequence,
        kind=op.kind,
        key=op.key,
        start=start,
        end=end,
        outcome=observation.outcome,
        success=observation.success,
        version=observation.version,
        served_sequence=observation.served_sequence,
        committed_at=observation.committed_at,
        bytes=meter.bytes,
        repetition=op.repetition,
        rows=observation.rows,
        flags=observation.flags,
    )


class VirtualExecutor(LoggingMixin):
    """Discrete-event execution against a :class:`VirtualClock`."""

    def __init__(self, clock: VirtualClock, backend: BackendInterface, cost_model: CostModel):
        self.clock = clock
        self.backend = backend
        self.cost_model = cost_model

    def run(self, workers: Sequence[Worker]) -> List[OperationRecord]:
        heap: List[Tuple[float, int, int, PlannedOperation]] = []
        records: List[OperationRecord] = []
        for index, worker in enumerate(workers):
            op = next(worker.plan, None)
            if op is not None:
                heapq.heappush(heap, (op.at, index, 0, op))

        while heap:
            at, index, sequence, op = heapq.heappop(heap)
            worker = workers[index]
            start = max(at, self.clock.now())
            self.clock.advance_to(start)
            try:
                observation, meter = _perform(worker.name, op, start)
            except ScenarioAbortedException as e:
                e.records = sorted(records, key=lambda r: (r.start, r.worker, r.sequence))
                raise
            end = start + self.cost_model.duration(meter, self.backend.live_node_count())
            records.append(_record(worker.name, sequence, op, start, end, observation, meter))
            try:
                following = worker.plan.send(end)
            except StopIteration:
                continue
            heapq.heappush(heap, (max(following.at, end), index, sequence + 1, following))

        if records:
            self.clock.advance_to(max(r.end for r in records))
        return records


class RealtimeExecutor(LoggingMixin):
    """One thread per worker, paced by the wall clock."""

    def __init__(self, clock: RealClock):
        self.clock = clock

    def _drive(self, worker: Worker) -> List[OperationRecord]:
        records: List[OperationRecord] = []
        op = next(worker.plan, None)
        sequence = 0
        while op is not None:
            self.clock.sleep_until(op.at)
            start = self.clock.now()
            try:
                observation, meter = _perform(worker.name, op, start)
            except ScenarioAbortedException as e:
                e.records = records
                raise
            end = self.clock.now()
            records.append(_record(worker.name, sequence, op, start, end, observation, meter))
            sequence += 1
            try:
                op = worker.plan.send(end)
            except StopIteration:
                op = None
        return records

    def run(self, workers: Sequence[Worker]) -> List[OperationRecord]:
        if not workers:
            return []
        with ThreadPoolExecutor(max_workers=len(workers), thread_name_prefix="scenario-worker") as pool:
            futures = [pool.submit(self._drive, worker) for worker in workers]
            merged: List[OperationRecord] = []
            failure: Optional[ScenarioAbortedException] = None
            for future in futures:
                try:
                    merged.extend(future.result())
                except ScenarioAbortedException as e:
                    merged.extend(e.records)
                    failure = failure or e
        merged.sort(key=lambda r: (r.start, r.worker, r.sequence))
        if failure is not None:
            failure.records = merged
            raise failure
        return merged


def make_executor(clock, backend: BackendInterface, cost_model: CostModel):
    if isinstance(clock, VirtualClock):
        return VirtualExecutor(clock, backend, cost_model)
    return RealtimeExecutor(clock)
