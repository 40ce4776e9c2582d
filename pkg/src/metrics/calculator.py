"""Metric formulas over sealed scenario reports.

Every function here is pure: the same reports and pricing give the same
numbers. "Throughput" keeps its benchmark meaning of total execution time,
so lower is better, and price performance is reported as seconds per USD.
"""

from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..scenarios.checks import DURABILITY_CHECK
from ..scenarios.models import OperationRecord, ScenarioReport
from .exceptions import MetricDomainException, MetricNotApplicableException, ReportStateException
from .models import GIB, HOURS_PER_MONTH, RESPONSE_TIME_BOUND_S, LatencySummary, MetricSet, MetricValue, PricingModel


def _require_sealed(report: ScenarioReport) -> None:
    if not report.sealed:
        raise ReportStateException(f"scenario {report.scenario_id} report is not sealed", report.scenario_id)


def throughput(report: ScenarioReport) -> float:
    """Seconds from scenario start to end in the report's clock domain.

    Virtual runs count simulated seconds, which stand for realtime seconds
    whatever the pacing speedup was.
    """
    _require_sealed(report)
    return max(0.0, report.ended_at - report.started_at)


completion_time_seconds = throughput


def price(report: ScenarioReport, model: PricingModel) -> float:
    """Nodes, storage and egress billed for the scenario's duration, plus the fixed fee."""
    hours = throughput(report) / 3600.0
    resources = report.resources
    return (
        resources.node_count * hours * model.per_node_hour_usd
        + resources.stored_bytes / GIB * hours / HOURS_PER_MONTH * model.per_gb_month_storage_usd
        + resources.egress_bytes / GIB * model.per_gb_egress_usd
        + model.fixed_platform_usd
    )


def price_performance(report: ScenarioReport, model: PricingModel) -> float:
    cost = price(report, model)
    if cost <= 0.0:
        raise MetricDomainException("price performance", f"price is {cost:g} USD under '{model.provider_name}'")
    return throughput(report) / cost


def increase_ratio(before: ScenarioReport, after: ScenarioReport) -> float:
    """Throughput after over throughput before; 1.0 is perfect scaling."""
    if before.scenario_id != after.scenario_id:
        raise MetricNotApplicableException(
            "throughput increase ratio", after.scenario_id, f"{before.scenario_id} (same as the baseline)"
        )
    base = throughput(before)
    if base <= 0.0:
        raise MetricDomainException("throughput increase ratio", "baseline throughput is zero")
    return throughput(after) / base


def ratio(numerator: int, denominator: int) -> MetricValue:
    """Quotient in [0, 1]; 0/0 is a vacuous 1.0."""
    if numerator < 0 or denominator < 0 or numerator > denominator:
        raise MetricDomainException("ratio", f"{numerator}/{denominator} is not a proportion")
    if denominator == 0:
        return MetricValue(value=1.0, vacuous=True)
    return MetricValue(value=numerator / denominator, numerator=numerator, denominator=denominator)


def _require_scenario(report: ScenarioReport, metric: str, scenario_id: int) -> None:
    _require_sealed(report)
    if report.scenario_id != scenario_id:
        raise MetricNotApplicableException(metric, report.scenario_id, str(scenario_id))


def durability_ratio(report: ScenarioReport) -> MetricValue:
    _require_scenario(report, "durability ratio", 1)
    return ratio(report.counters.correct_reads, report.counters.total_reads)


def consistency_ratio(report: ScenarioReport) -> MetricValue:
    _require_scenario(report, "consistency ratio", 2)
    return ratio(report.counters.consistent_reads, report.counters.total_reads)


def concurrency_ratio(report: ScenarioReport) -> MetricValue:
    _require_scenario(report, "concurrency ratio", 4)
    return ratio(report.counters.successful_ops, report.counters.total_ops)


def latencies(records: Iterable[OperationRecord], kinds: Optional[Sequence[str]] = None) -> List[float]:
    return [r.latency for r in records if r.kind != DURABILITY_CHECK and (kinds is None or r.kind in kinds)]


def summarize_latencies(values: Sequence[float], bound: float = RESPONSE_TIME_BOUND_S) -> LatencySummary:
    if len(values) == 0:
        return LatencySummary()
    data = np.asarray(values, dtype=float)
    p50, p95, p99 = np.percentile(data, [50, 95, 99])
    return LatencySummary(
        count=int(data.size),
        mean_s=float(data.mean()),
        p50_s=float(p50),
        p95_s=float(p95),
        p99_s=float(p99),
        max_s=float(data.max()),
        within_bound_share=float(np.mean(data <= bound)),
    )


_RATIOS = {1: ("durability_ratio", durability_ratio), 2: ("consistency_ratio", consistency_ratio),
           4: ("concurrency_ratio", concurrency_ratio)}


def compute_metrics(
    report: ScenarioReport,
    pricing: Optional[PricingModel] = None,
    baseline: Optional[ScenarioReport] = None,
) -> MetricSet:
    """All metrics that apply to ``report``; price fields need ``pricing``."""
    seconds = throughput(report)
    metrics = MetricSet(
        scenario_id=report.scenario_id,
        throughput=seconds,
        completion_time_seconds=seconds,
        latency=summarize_latencies(latencies(report.records, None)),
    )
    if pricing is not None:
        metrics.price_usd = price(report, pricing)
        if metrics.price_usd > 0.0:
            metrics.price_performance = seconds / metrics.price_usd
    if baseline is not None:
        metrics.throughput_increase_ratio = increase_ratio(baseline, report)
    if report.scenario_id in _RATIOS:
        field, formula = _RATIOS[report.scenario_id]
        setattr(metrics, field, formula(report))
    return metrics
