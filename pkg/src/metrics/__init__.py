"""Benchmark metrics, pricing and the cloud property table."""

from .calculator import (
    completion_time_seconds,
    compute_metrics,
    concurrency_ratio,
    consistency_ratio,
    durability_ratio,
    increase_ratio,
    price,
    price_performance,
    ratio,
    summarize_latencies,
    throughput,
)
from .exceptions import MetricDomainException, MetricNotApplicableException, PricingConfigException, ReportStateException
from .export import ExportFormat, export_table, load_report, load_reports, metric_sets, write_report
from .models import LatencySummary, MetricSet, MetricValue, PricingModel, PropertyRow, PropertyStatus
from .properties import PROPERTY_DEFINITIONS, property_report

__all__ = [
    "ExportFormat",
    "LatencySummary",
    "MetricDomainException",
    "MetricNotApplicableException",
    "MetricSet",
    "MetricValue",
    "PROPERTY_DEFINITIONS",
    "PricingConfigException",
    "PricingModel",
    "PropertyRow",
    "PropertyStatus",
    "ReportStateException",
    "completion_time_seconds",
    "compute_metrics",
    "concurrency_ratio",
    "consistency_ratio",
    "durability_ratio",
    "export_table",
    "increase_ratio",
    "load_report",
    "load_reports",
    "metric_sets",
    "price",
    "price_performance",
    "property_report",
    "ratio",
    "summarize_latencies",
    "throughput",
    "write_report",
]
