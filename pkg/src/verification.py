"""Self-consistency audits behind ``verify``."""

from typing import Iterable, List, NamedTuple, Sequence

from .corpus.xml_codec import find_dangling_references, find_invariant_violations, parse_entity, serialize_entity
from .exceptions import PreconditionException, PrimeballException
from .generator.dataset import GeneratedCorpus
from .logging_config import get_logger
from .scenarios.checks import audit_report, replay_concurrency, replay_consistency
from .scenarios.models import ScenarioReport

logger = get_logger(__name__)


class VerificationException(PreconditionException):
    """At least one audit failed."""

    error_class = "verification-failed"

    def __init__(self, failed: Sequence["CheckResult"]):
        names = ", ".join(check.name for check in failed)
        super().__init__(f"{len(failed)} check(s) failed: {names}", failed=[c.name for c in failed])


class CheckResult(NamedTuple):
    name: str
    ok: bool
    detail: str = ""


def verify_corpus(corpus: GeneratedCorpus) -> List[CheckResult]:
    """Round-trip every entity through the codec and scan for dangling ids."""
    entities = list(corpus.all_entities())
    broken = []
    for entity in entities:
        try:
            if parse_entity(serialize_entity(entity)) != entity:
                broken.append(entity.id)
        except PrimeballException as e:
            broken.append(f"{entity.id} ({e.message})")
    dangling = find_dangling_references(entities)
    violations = find_invariant_violations(entities, (corpus.config.start_date, corpus.config.end_date))
    return [
        CheckResult(
            "corpus round-trip", not broken,
            f"{len(entities)} entities" if not broken else f"{len(broken)} differ, first {broken[0]}",
        ),
        CheckResult(
            "referential closure", not dangling,
            "no dangling ids" if not dangling else "{} -> {} {}".format(*dangling[0]),
        ),
        CheckResult(
            "cross-entity invariants", not violations,
            "ok" if not violations else violations[0],
        ),
    ]


def verify_report(report: ScenarioReport) -> List[CheckResult]:
    label = f"scenario {report.scenario_id}"
    audit = audit_report(report)
    checks = [
        CheckResult(
            f"{label} counter audit", audit.ok,
            "counters recompute" if audit.ok else ", ".join(
                f"{name} {reported}!={expected}" for name, (reported, expected) in audit.mismatches.items()
            ),
        )
    ]
    if report.scenario_id == 2:
        replay = replay_consistency(report)
        matches = (replay.regressions, replay.consistent_reads) == (
            report.counters.regressions, report.counters.consistent_reads
        )
        checks.append(CheckResult(
            f"{label} consistency replay", matches,
            f"regressions {replay.regressions}, consistent {replay.consistent_reads}/{replay.total_reads}",
        ))
    elif report.scenario_id == 4:
        replay = replay_concurrency(report)
        matches = (replay.total_ops, replay.successful_ops) == (
            report.counters.total_ops, report.counters.successful_ops
        )
        checks.append(CheckResult(
            f"{label} concurrency replay", matches,
            f"inconsistencies {replay.inconsistencies}, expected not-found {replay.expected_not_found}",
        ))
    elif report.scenario_id == 3 and report.details.get("oracle_match") is not None:
        checks.append(CheckResult(
            f"{label} reachability oracle", bool(report.details["oracle_match"]),
            f"survived {report.details.get('survivable_removals')}, "
            f"oracle {report.details.get('oracle_survivable')}",
        ))
    return checks


def verify_reports(reports: Iterable[ScenarioReport]) -> List[CheckResult]:
    return [check for report in reports for check in verify_report(report)]


def require_passing(checks: Sequence[CheckResult]) -> None:
    failed = [check for check in checks if not check.ok]
    if failed:
        logger.warning("Verification failed: %s", [c.name for c in failed])
        raise VerificationException(failed)
