"""Loading reports and rendering the property table."""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from ..logging_config import get_logger
from ..scenarios.models import REPORT_SCHEMA_VERSION, ScenarioReport
from .calculator import compute_metrics
from .exceptions import ReportStateException
from .models import MetricSet, PricingModel, PropertyRow

logger = get_logger(__name__)


class ExportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    MARKDOWN = "markdown"


def load_report(path: Union[str, Path]) -> ScenarioReport:
    path = Path(path)
    try:
        report = ScenarioReport.from_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ReportStateException(f"cannot read report {path}: {e}") from e
    except ValidationError as e:
        raise ReportStateException(f"{path} is not a scenario report: {e.errors()[0]['msg']}") from e
    if report.schema_version != REPORT_SCHEMA_VERSION:
        raise ReportStateException(
            f"{path} has report schema {report.schema_version}, expected {REPORT_SCHEMA_VERSION}", report.scenario_id
        )
    return report


def load_reports(source: Union[str, Path, Iterable[Union[str, Path]]]) -> List[ScenarioReport]:
    """Reports from a file, a directory of ``*.json`` files, or a list of paths."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        paths = sorted(path.glob("*.json")) if path.is_dir() else [path]
    else:
        paths = [Path(p) for p in source]
    reports = [load_report(p) for p in paths]
    logger.debug("Loaded %d reports", len(reports))
    return reports


def write_report(report: ScenarioReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json(), encoding="utf-8")
    return path


def property_frame(rows: Sequence[PropertyRow]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "property": row.property,
                "display_name": row.display_name,
                "metric": row.metric,
                "value": row.value,
                "unit": row.unit,
                "status": row.status.value,
                "evidence": "; ".join(row.evidence),
                "missing": "; ".join(row.missing),
            }
            for row in rows
        ],
        columns=["property", "display_name", "metric", "value", "unit", "status", "evidence", "missing"],
    )


def metric_sets(
    reports: Sequence[ScenarioReport], pricing: Optional[PricingModel] = None
) -> List[MetricSet]:
    return [compute_metrics(report, pricing) for report in reports if report.sealed]


def _format_value(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.6g}"


def render_markdown(rows: Sequence[PropertyRow], metrics: Sequence[MetricSet] = ()) -> str:
    lines = [
        "| Property | Metric | Value | Unit | Status | Evidence |",
        "|---|---|---|---|---|---|",
    ]
    for row in rows:
        evidence = ", ".join(row.evidence) if row.sufficient else "missing: " + ", ".join(row.missing)
        lines.append(
            f"| {row.display_name} | {row.metric} | {_format_value(row.value)} | {row.unit} "
            f"| {row.status.value} | {evidence} |"
        )
    if metrics:
        lines += [
            "",
            "| Scenario | Throughput (s) | Price (USD) | Price performance (s/USD) | Ratio |",
            "|---|---|---|---|---|",
        ]
        for m in metrics:
            ratio = m.durability_ratio or m.consistency_ratio or m.concurrency_ratio
            ratio_text = "" if ratio is None else f"{ratio.value:.4f}{' (vacuous)' if ratio.vacuous else ''}"
            lines.append(
                f"| {m.scenario_id} | {m.throughput:.3f} | {_format_value(m.price_usd)} "
                f"| {_format_value(m.price_performance)} | {ratio_text} |"
            )
    return "\n".join(lines) + "\n"


def export_table(
    rows: Sequence[PropertyRow],
    fmt: Union[ExportFormat, str] = ExportFormat.JSON,
    metrics: Sequence[MetricSet] = (),
) -> str:
    """The property table (and per-scenario metrics) as text in ``fmt``."""
    fmt = ExportFormat(fmt)
    if fmt is ExportFormat.CSV:
        return property_frame(rows).to_csv(index=False)
    if fmt is ExportFormat.MARKDOWN:
        return render_markdown(rows, metrics)
    payload: Dict[str, Any] = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "properties": [row.model_dump(mode="json") for row in rows],
        "metrics": [m.model_dump(mode="json") for m in metrics],
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"
