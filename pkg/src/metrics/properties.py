"""The thirteen generic cloud properties and how each is measured."""

from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..logging_config import get_logger
from ..scenarios.models import ScenarioReport
from .calculator import (
    concurrency_ratio,
    consistency_ratio,
    durability_ratio,
    latencies,
    summarize_latencies,
    throughput,
)
from .models import PropertyDefinition, PropertyRow, PropertyStatus

logger = get_logger(__name__)


def _query(*kinds: str) -> Tuple[str, ...]:
    return tuple(f"query:{kind}" for kind in kinds)


PROPERTY_DEFINITIONS: "OrderedDict[str, PropertyDefinition]" = OrderedDict(
    (definition.name, definition)
    for definition in (
        PropertyDefinition(
            name="scale_up",
            display_name="Scale up",
            metric="throughput increase ratio",
            unit="ratio",
            scenarios=(4, 5),
            query_kinds=(),
            measurement="Scenarios 4 and 5 after doubling data and nodes, over the baseline run",
        ),
        PropertyDefinition(
            name="elastic_speedup",
            display_name="Elastic speedup",
            metric="throughput increase ratio",
            unit="ratio",
            scenarios=(2, 4, 5),
            query_kinds=(),
            measurement="Scenarios 2, 4 and 5 with more nodes on the same data, over the baseline run",
        ),
        PropertyDefinition(
            name="horizontal_scalability",
            display_name="Horizontal scalability",
            metric="throughput increase ratio",
            unit="ratio",
            scenarios=(4, 5),
            query_kinds=(),
            measurement="Scenarios 4 and 5 with load and nodes grown together; closer to 1 is better",
        ),
        PropertyDefinition(
            name="latency",
            display_name="Latency",
            metric="mean response time",
            unit="s",
            scenarios=(4, 5, 6),
            query_kinds=(),
            measurement="Per-operation response times of Scenarios 4, 5 and 6",
        ),
        PropertyDefinition(
            name="durability",
            display_name="Durability",
            metric="durability ratio",
            unit="ratio",
            scenarios=(1,),
            query_kinds=(),
            measurement="Correct reads over total reads in Scenario 1",
        ),
        PropertyDefinition(
            name="consistency",
            display_name="Consistency",
            metric="consistency ratio",
            unit="ratio",
            scenarios=(2,),
            query_kinds=(),
            measurement="Consistent reads over total reads in Scenario 2",
        ),
        PropertyDefinition(
            name="availability",
            display_name="Availability",
            metric="survivable node removals",
            unit="nodes",
            scenarios=(3, 6),
            query_kinds=(),
            measurement="Nodes removable before data becomes unreachable (Scenario 3), recovery from empty (Scenario 6)",
        ),
        PropertyDefinition(
            name="concurrency",
            display_name="Concurrency",
            metric="concurrency ratio",
            unit="ratio",
            scenarios=(4,),
            query_kinds=(),
            measurement="Successful operations over total operations in Scenario 4",
        ),
        PropertyDefinition(
            name="path_traversals",
            display_name="Path traversals",
            metric="mean query time",
            unit="s",
            scenarios=(),
            query_kinds=_query("Q3", "Q4", "Q7", "Q10", "Q12"),
            measurement="Execution times of the queries that follow references",
        ),
        PropertyDefinition(
            name="complex_results",
            display_name="Complex results",
            metric="mean query time",
            unit="s",
            scenarios=(6,),
            query_kinds=_query("Q2", "Q3", "Q6", "Q11"),
            measurement="Execution times of aggregating queries and of initialization",
        ),
        PropertyDefinition(
            name="polymorphism",
            display_name="Polymorphism",
            metric="mean query time",
            unit="s",
            scenarios=(),
            query_kinds=_query("Q3", "Q9", "Q12", "Q14"),
            measurement="Execution times of queries over journalists and professionals alike",
        ),
        PropertyDefinition(
            name="analysis",
            display_name="Analysis",
            metric="throughput",
            unit="s",
            scenarios=(5,),
            query_kinds=(),
            measurement="Total time of Scenario 5",
        ),
        PropertyDefinition(
            name="full_text",
            display_name="Full text",
            metric="mean search time",
            unit="s",
            scenarios=(),
            query_kinds=_query("FT"),
            measurement="Execution times of single-term searches over all documents",
        ),
    )
)


def latest_reports(reports: Sequence[ScenarioReport]) -> Tuple[Dict[int, ScenarioReport], List[int]]:
    """Last valid report per scenario, and the scenarios seen only as invalid reports."""
    chosen: Dict[int, ScenarioReport] = {}
    invalid = set()
    for report in reports:
        if report.valid and report.sealed:
            chosen[report.scenario_id] = report
        else:
            invalid.add(report.scenario_id)
    return chosen, sorted(invalid - set(chosen))


class _Evidence:
    def __init__(self, reports: Sequence[ScenarioReport], baseline: Sequence[ScenarioReport]):
        self.by_scenario, self.invalid = latest_reports(reports)
        self.baseline, _ = latest_reports(baseline)

    def missing_scenarios(self, scenarios: Sequence[int], from_baseline: bool = False) -> List[str]:
        source = self.baseline if from_baseline else self.by_scenario
        label = "baseline scenario" if from_baseline else "scenario"
        missing = []
        for scenario_id in scenarios:
            if scenario_id not in source:
                suffix = " (invalid)" if not from_baseline and scenario_id in self.invalid else ""
                missing.append(f"{label} {scenario_id}{suffix}")
        return missing

    def query_latencies(self, kinds: Sequence[str]) -> Dict[str, List[float]]:
        found: Dict[str, List[float]] = {}
        for scenario_id in sorted(self.by_scenario):
            for kind in kinds:
                values = latencies(self.by_scenario[scenario_id].records, (kind,))
                if values:
                    found.setdefault(kind, []).extend(values)
        return found

    def query_sources(self, kinds: Sequence[str]) -> List[str]:
        return [
            f"scenario {scenario_id}"
            for scenario_id, report in sorted(self.by_scenario.items())
            if any(r.kind in kinds for r in report.records)
        ]


def _row(definition: PropertyDefinition, **fields) -> PropertyRow:
    row = PropertyRow(
        property=definition.name, display_name=definition.display_name, metric=definition.metric,
        unit=definition.unit, **fields,
    )
    if row.missing:
        row.status = PropertyStatus.INSUFFICIENT
        row.value = None
    return row


def _increase_row(definition: PropertyDefinition, evidence: _Evidence) -> PropertyRow:
    missing = evidence.missing_scenarios(definition.scenarios)
    missing += evidence.missing_scenarios(definition.scenarios, from_baseline=True)
    used = [evidence.by_scenario[s] for s in definition.scenarios if s in evidence.by_scenario]
    details = {"throughput_s": sum(throughput(r) for r in used)}
    value = None
    if not missing:
        before = sum(throughput(evidence.baseline[s]) for s in definition.scenarios)
        details["baseline_throughput_s"] = before
        if before > 0.0:
            value = details["throughput_s"] / before
        else:
            missing.append("non-zero baseline throughput")
    return _row(
        definition, value=value, evidence=[f"scenario {s}" for s in definition.scenarios if s in evidence.by_scenario],
        missing=missing, details=details,
    )


def _ratio_row(definition: PropertyDefinition, evidence: _Evidence, formula) -> PropertyRow:
    missing = evidence.missing_scenarios(definition.scenarios)
    scenario_id = definition.scenarios[0]
    if missing:
        return _row(definition, missing=missing)
    report = evidence.by_scenario[scenario_id]
    metric = formula(report)
    details = {"vacuous": metric.vacuous, "numerator": metric.numerator, "denominator": metric.denominator}
    if scenario_id == 2:
        details["regressions"] = report.counters.regressions
    if scenario_id == 4:
        details["inconsistencies"] = report.counters.total_ops - report.counters.successful_ops
    return _row(definition, value=metric.value, evidence=[f"scenario {scenario_id}"], details=details)


def _query_row(definition: PropertyDefinition, evidence: _Evidence) -> PropertyRow:
    found = evidence.query_latencies(definition.query_kinds)
    missing = [kind.split(":", 1)[1] for kind in definition.query_kinds if kind not in found]
    missing += evidence.missing_scenarios(definition.scenarios)
    values = [v for kind in definition.query_kinds for v in found.get(kind, ())]
    details = {kind.split(":", 1)[1]: float(np.mean(v)) for kind, v in found.items()}
    for scenario_id in definition.scenarios:
        if scenario_id in evidence.by_scenario:
            details[f"scenario_{scenario_id}_throughput_s"] = throughput(evidence.by_scenario[scenario_id])
    sources = evidence.query_sources(definition.query_kinds)
    sources += [f"scenario {s}" for s in definition.scenarios if s in evidence.by_scenario and f"scenario {s}" not in sources]
    return _row(
        definition, value=float(np.mean(values)) if values else None, evidence=sources, missing=missing,
        details=details,
    )


def _latency_row(definition: PropertyDefinition, evidence: _Evidence) -> PropertyRow:
    missing = evidence.missing_scenarios(definition.scenarios)
    used = [evidence.by_scenario[s] for s in definition.scenarios if s in evidence.by_scenario]
    summary = summarize_latencies([v for report in used for v in latencies(report.records)])
    return _row(
        definition, value=summary.mean_s if summary.count else None,
        evidence=[f"scenario {r.scenario_id}" for r in used], missing=missing, details=summary.model_dump(),
    )


def _availability_row(definition: PropertyDefinition, evidence: _Evidence) -> PropertyRow:
    missing = evidence.missing_scenarios(definition.scenarios)
    details = {}
    value = None
    s3 = evidence.by_scenario.get(3)
    if s3 is not None:
        value = s3.details.get("survivable_removals")
        details.update({
            key: s3.details.get(key)
            for key in ("oracle_survivable", "oracle_match", "oracle_min", "oracle_max", "kill_order")
        })
    s6 = evidence.by_scenario.get(6)
    if s6 is not None:
        details["initialization_throughput_s"] = throughput(s6)
    return _row(
        definition, value=None if value is None else float(value),
        evidence=[f"scenario {s}" for s in definition.scenarios if s in evidence.by_scenario],
        missing=missing, details=details,
    )


def _analysis_row(definition: PropertyDefinition, evidence: _Evidence) -> PropertyRow:
    missing = evidence.missing_scenarios(definition.scenarios)
    if missing:
        return _row(definition, missing=missing)
    report = evidence.by_scenario[5]
    return _row(
        definition, value=throughput(report), evidence=["scenario 5"],
        details={"executions": report.details.get("executions", {}), "mean_latency": report.details.get("mean_latency", {})},
    )


def property_report(
    reports: Sequence[ScenarioReport],
    baseline: Sequence[ScenarioReport] = (),
) -> List[PropertyRow]:
    """One row per property, in definition order.

    Scaling properties compare against ``baseline`` reports of the same
    scenarios; rows whose evidence is missing are marked, never dropped.
    """
    evidence = _Evidence(reports, baseline)
    rows: List[PropertyRow] = []
    for name, definition in PROPERTY_DEFINITIONS.items():
        if name in ("scale_up", "elastic_speedup", "horizontal_scalability"):
            row = _increase_row(definition, evidence)
        elif name == "latency":
            row = _latency_row(definition, evidence)
        elif name == "durability":
            row = _ratio_row(definition, evidence, durability_ratio)
        elif name == "consistency":
            row = _ratio_row(definition, evidence, consistency_ratio)
        elif name == "concurrency":
            row = _ratio_row(definition, evidence, concurrency_ratio)
        elif name == "availability":
            row = _availability_row(definition, evidence)
        elif name == "analysis":
            row = _analysis_row(definition, evidence)
        else:
            row = _query_row(definition, evidence)
        rows.append(row)
    insufficient = sum(1 for row in rows if not row.sufficient)
    if insufficient:
        logger.info("%d of %d properties lack evidence", insufficient, len(rows))
    return rows
