"""Offline checks over recorded operation traces.

Counters of a report are a function of its records; :func:`count_operations`
is that function and :func:`audit_report` re-applies it to a (possibly
reloaded) report. The replays re-derive read classifications from raw
outcomes without trusting the flags the runner stored.
"""

from collections import defaultdict
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from ..logging_config import get_logger
from .models import OperationRecord, ScenarioCounters, ScenarioReport

logger = get_logger(__name__)

DURABILITY_CHECK = "durability-check"
REGRESSION = "regression"
STALE = "stale"
EXPECTED_NOT_FOUND = "expected-not-found"

_WRITE_KINDS = ("update", "insert", "delete", "write")


class CommittedWrite(NamedTuple):
    committed_at: float
    sequence: int
    deleted: bool


class AuditResult(NamedTuple):
    ok: bool
    expected: ScenarioCounters
    mismatches: Dict[str, Tuple[int, int]]  # counter -> (reported, recomputed)


def count_operations(scenario_id: int, records: Sequence[OperationRecord]) -> ScenarioCounters:
    """Counters derived from the record list alone."""
    checks = [r for r in records if r.kind == DURABILITY_CHECK]
    operations = [r for r in records if r.kind != DURABILITY_CHECK]
    reads = [r for r in operations if r.is_read]
    kills = [r for r in operations if r.kind == "kill"]

    if scenario_id == 1:
        total_reads = len(checks)
        correct_reads = sum(1 for r in checks if r.success)
    else:
        total_reads = len(reads)
        correct_reads = sum(1 for r in reads if r.success)
    return ScenarioCounters(
        total_reads=total_reads,
        correct_reads=correct_reads,
        consistent_reads=sum(1 for r in reads if r.success and REGRESSION not in r.flags),
        regressions=sum(1 for r in reads if REGRESSION in r.flags),
        stale_reads=sum(1 for r in reads if STALE in r.flags),
        total_ops=len(operations),
        successful_ops=sum(1 for r in operations if r.success and STALE not in r.flags),
        unreachable_keys=(kills[-1].rows or 0) if kills else 0,
    )


def audit_report(report: ScenarioReport) -> AuditResult:
    expected = count_operations(report.scenario_id, report.records)
    reported = report.counters.model_dump()
    mismatches = {
        name: (reported[name], value)
        for name, value in expected.model_dump().items()
        if reported[name] != value
    }
    if mismatches:
        logger.warning("Scenario %d report fails its audit: %s", report.scenario_id, mismatches)
    return AuditResult(ok=not mismatches, expected=expected, mismatches=mismatches)


# -- read classification -------------------------------------------------------------


def committed_writes(records: Iterable[OperationRecord]) -> Dict[str, List[CommittedWrite]]:
    """Acknowledged writes per key, in commit order."""
    writes: Dict[str, List[CommittedWrite]] = defaultdict(list)
    for record in records:
        if (
            record.kind in _WRITE_KINDS
            and record.success
            and record.key is not None
            and record.committed_at is not None
            and record.served_sequence is not None
        ):
            writes[record.key].append(
                CommittedWrite(record.committed_at, record.served_sequence, record.kind == "delete")
            )
    for history in writes.values():
        history.sort()
    return writes


def required_write(history: Sequence[CommittedWrite], instant: float, window: float) -> Optional[CommittedWrite]:
    """Newest write that must be visible at ``instant``: committed more than ``window`` earlier."""
    required = None
    for write in history:
        if write.committed_at + window < instant:
            if required is None or write.sequence > required.sequence:
                required = write
        else:
            break
    return required


def classify_read(
    record: OperationRecord, writes: Dict[str, List[CommittedWrite]], window: float
) -> Tuple[bool, Tuple[str, ...]]:
    """``(success, flags)`` for a read under the staleness contract.

    A not-found on a key whose delete had committed by the time the read
    returned is an expected race and counts as a success.
    """
    flags = tuple(f for f in record.flags if f not in (STALE, EXPECTED_NOT_FOUND))
    history = writes.get(record.key or "", [])
    if record.outcome == "not-found":
        if any(w.deleted and w.committed_at <= record.end for w in history):
            return True, flags + (EXPECTED_NOT_FOUND,)
        return False, flags
    if record.outcome != "ok":
        return record.success, flags
    required = required_write(history, record.start, window)
    if required is not None and (record.served_sequence or 0) < required.sequence:
        return record.success, flags + (STALE,)
    return record.success, flags


def classify_reads(records: Sequence[OperationRecord], window: float) -> List[OperationRecord]:
    """Records with read flags and success set from the whole trace."""
    writes = committed_writes(records)
    classified = []
    for record in records:
        if record.is_read:
            success, flags = classify_read(record, writes, window)
            if success != record.success or flags != record.flags:
                record = record.model_copy(update={"success": success, "flags": flags})
        classified.append(record)
    return classified


# -- replays -------------------------------------------------------------------------


class ConsistencyReplay(NamedTuple):
    total_reads: int
    failed_reads: int
    regressions: int
    stale_reads: int

    @property
    def consistent_reads(self) -> int:
        return self.total_reads - self.failed_reads - self.regressions


def count_regressions(records: Sequence[OperationRecord]) -> int:
    """Reads that served an older commit than one the same worker had already seen."""
    seen: Dict[Tuple[int, str, str], int] = {}
    regressions = 0
    ordered = sorted((r for r in records if r.is_read), key=lambda r: (r.repetition, r.worker, r.sequence))
    for record in ordered:
        if record.outcome != "ok" or record.served_sequence is None:
            continue
        session = (record.repetition, record.worker, record.key or "")
        newest = seen.get(session, 0)
        if record.served_sequence < newest:
            regressions += 1
        else:
            seen[session] = record.served_sequence
    return regressions


def replay_consistency(report: ScenarioReport, window: Optional[float] = None) -> ConsistencyReplay:
    """Trace oracle for read regressions and staleness."""
    window = report_window(report) if window is None else window
    writes = committed_writes(report.records)
    reads = [r for r in report.records if r.is_read]
    stale = sum(1 for r in reads if STALE in classify_read(r, writes, window)[1])
    return ConsistencyReplay(
        total_reads=len(reads),
        failed_reads=sum(1 for r in reads if r.outcome != "ok"),
        regressions=count_regressions(reads),
        stale_reads=stale,
    )


class ConcurrencyReplay(NamedTuple):
    total_ops: int
    successful_ops: int
    failed_ops: int
    stale_reads: int
    expected_not_found: int

    @property
    def inconsistencies(self) -> int:
        return self.failed_ops + self.stale_reads


def replay_concurrency(report: ScenarioReport, window: Optional[float] = None) -> ConcurrencyReplay:
    """Trace oracle for Scenario 4: every operation classified from raw outcomes."""
    window = report_window(report) if window is None else window
    writes = committed_writes(report.records)
    total = successful = failed = stale = expected = 0
    for record in report.records:
        if record.kind == DURABILITY_CHECK:
            continue
        total += 1
        if record.is_read:
            raw = record.model_copy(update={"flags": (), "success": record.outcome == "ok"})
            success, flags = classify_read(raw, writes, window)
            if EXPECTED_NOT_FOUND in flags:
                expected += 1
            if STALE in flags:
                stale += 1
                continue
        else:
            success = record.outcome == "ok"
        if success:
            successful += 1
        else:
            failed += 1
    return ConcurrencyReplay(total, successful, failed, stale, expected)


def report_window(report: ScenarioReport) -> float:
    """Staleness window in seconds from the report's config echo."""
    cluster = report.config.get("cluster", {})
    if cluster.get("consistency", "strong") == "strong":
        return 0.0
    return float(cluster.get("staleness_window_ms", 0.0)) / 1000.0
