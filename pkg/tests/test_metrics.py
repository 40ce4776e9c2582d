"""Tests for metric formulas, pricing, the property table and its exports."""

import json

import numpy as np
import pytest

from src.metrics.calculator import (
    compute_metrics,
    consistency_ratio,
    durability_ratio,
    increase_ratio,
    price,
    price_performance,
    ratio,
    summarize_latencies,
    throughput,
)
from src.metrics.exceptions import (
    MetricDomainException,
    MetricNotApplicableException,
    PricingConfigException,
    ReportStateException,
)
from src.metrics.export import ExportFormat, export_table, load_report, load_reports, metric_sets, write_report
from src.metrics.models import GIB, PricingModel, PropertyStatus
from src.metrics.properties import PROPERTY_DEFINITIONS, property_report
from src.scenarios.models import OperationRecord, ResourceUsage, ScenarioCounters, ScenarioReport

PRICING = PricingModel(
    provider_name="test-cloud",
    per_node_hour_usd=2.0,
    per_gb_month_storage_usd=730.0,
    per_gb_egress_usd=0.5,
    fixed_platform_usd=0.25,
)


def op(kind: str, start: float, latency: float, worker: str = "w", **fields) -> OperationRecord:
    return OperationRecord(worker=worker, sequence=0, kind=kind, start=start, end=start + latency, **fields)


def sealed(scenario_id: int, seconds: float = 10.0, records=(), sealed_flag: bool = True, valid: bool = True,
           **fields) -> ScenarioReport:
    return ScenarioReport(
        scenario_id=scenario_id,
        clock_mode="virtual",
        started_at=0.0,
        ended_at=seconds,
        records=list(records),
        sealed=sealed_flag,
        valid=valid,
        **fields,
    )


class TestThroughputAndPrice:
    """Time and cost of a single report."""

    @pytest.fixture
    def hour_long(self):
        return sealed(4, seconds=3600.0, resources=ResourceUsage(node_count=5, stored_bytes=GIB, egress_bytes=2 * GIB))

    def test_throughput_is_scenario_duration(self):
        assert throughput(sealed(5, seconds=12.5)) == 12.5

    def test_unsealed_report_is_rejected(self):
        with pytest.raises(ReportStateException) as exc_info:
            throughput(sealed(5, sealed_flag=False))

        assert exc_info.value.exit_code == 4

    def test_price_adds_every_component(self, hour_long):
        # nodes 5 * 1h * 2.0, storage 1 GiB for 1/730 month at 730, egress 2 GiB at 0.5, fixed 0.25
        assert price(hour_long, PRICING) == pytest.approx(10.0 + 1.0 + 1.0 + 0.25)

    def test_price_is_linear_in_rates(self, hour_long):
        assert price(hour_long, PRICING.scaled(2)) == pytest.approx(2 * price(hour_long, PRICING))

    def test_price_performance(self, hour_long):
        assert price_performance(hour_long, PRICING) == pytest.approx(3600.0 / 12.25)

    def test_free_provider_has_no_price_performance(self, hour_long):
        with pytest.raises(MetricDomainException):
            price_performance(hour_long, PricingModel())

    def test_increase_ratio(self):
        assert increase_ratio(sealed(5, seconds=10.0), sealed(5, seconds=5.0)) == pytest.approx(0.5)

    def test_increase_ratio_needs_same_scenario(self):
        with pytest.raises(MetricNotApplicableException) as exc_info:
            increase_ratio(sealed(4), sealed(5))

        assert exc_info.value.exit_code == 2


class TestRatios:
    """Proportions reported by Scenarios 1, 2 and 4."""

    def test_plain_ratio(self):
        value = ratio(3, 4)

        assert value.value == 0.75
        assert not value.vacuous

    def test_zero_over_zero_is_vacuous(self):
        value = ratio(0, 0)

        assert value.value == 1.0
        assert value.vacuous

    @pytest.mark.parametrize("numerator, denominator", [(5, 4), (-1, 4)])
    def test_not_a_proportion(self, numerator, denominator):
        with pytest.raises(MetricDomainException):
            ratio(numerator, denominator)

    def test_ratio_is_tied_to_its_scenario(self):
        report = sealed(2, counters=ScenarioCounters(total_reads=10, consistent_reads=9))

        assert consistency_ratio(report).value == pytest.approx(0.9)
        with pytest.raises(MetricNotApplicableException):
            durability_ratio(report)

    def test_compute_metrics_fills_applicable_fields(self):
        report = sealed(
            4,
            records=[op("read", 0.0, 0.1), op("update", 1.0, 0.3)],
            counters=ScenarioCounters(total_ops=4, successful_ops=3),
        )

        metrics = compute_metrics(report, PRICING, baseline=sealed(4, seconds=20.0))

        assert metrics.concurrency_ratio.value == 0.75
        assert metrics.durability_ratio is None
        assert metrics.throughput_increase_ratio == pytest.approx(0.5)
        assert metrics.price_usd == pytest.approx(0.25)
        assert metrics.latency.count == 2


class TestRandomizedFormulas:
    """A thousand random reports and rate cards against the formulas written out."""

    CASES = 1000

    @pytest.fixture(scope="class")
    def cases(self):
        rng = np.random.default_rng(2024)
        cases = []
        for _ in range(self.CASES):
            rates = rng.uniform(0.0, 10.0, size=4)
            model = PricingModel(
                provider_name="random",
                per_node_hour_usd=rates[0],
                per_gb_month_storage_usd=rates[1],
                per_gb_egress_usd=rates[2],
                fixed_platform_usd=rates[3],
            )
            usage = ResourceUsage(
                node_count=int(rng.integers(1, 64)),
                stored_bytes=int(rng.integers(0, 64 * GIB)),
                egress_bytes=int(rng.integers(0, 8 * GIB)),
            )
            report = sealed(4, seconds=float(rng.uniform(0.0, 7200.0)), resources=usage)
            cases.append((report, model, float(rng.uniform(0.1, 5.0))))
        return cases

    @staticmethod
    def expected_price(report: ScenarioReport, model: PricingModel) -> float:
        hours = (report.ended_at - report.started_at) / 3600.0
        usage = report.resources
        months = hours / 730.0
        return (
            usage.node_count * model.per_node_hour_usd * hours
            + usage.stored_bytes / 2 ** 30 * model.per_gb_month_storage_usd * months
            + usage.egress_bytes / 2 ** 30 * model.per_gb_egress_usd
            + model.fixed_platform_usd
        )

    def test_price_matches_the_written_out_formula(self, cases):
        for report, model, _ in cases:
            assert price(report, model) == pytest.approx(self.expected_price(report, model), rel=1e-9)

    def test_price_never_undercuts_the_fixed_fee(self, cases):
        for report, model, _ in cases:
            assert price(report, model) >= model.fixed_platform_usd

    def test_price_scales_with_the_rate_card(self, cases):
        for report, model, factor in cases:
            assert price(report, model.scaled(factor)) == pytest.approx(factor * price(report, model), rel=1e-9)

    def test_ratios_stay_proportions(self):
        rng = np.random.default_rng(99)
        for _ in range(self.CASES):
            denominator = int(rng.integers(1, 10_000))
            numerator = int(rng.integers(0, denominator + 1))

            value = ratio(numerator, denominator)

            assert 0.0 <= value.value <= 1.0
            assert value.value == numerator / denominator
            with pytest.raises(MetricDomainException):
                ratio(denominator + 1 + numerator, denominator)


class TestLatencySummary:
    def test_share_within_bound(self):
        summary = summarize_latencies([0.1, 0.3])

        assert summary.within_bound_share == 0.5
        assert summary.max_s == 0.3
        assert summary.mean_s == pytest.approx(0.2)

    def test_no_values(self):
        assert summarize_latencies([]).count == 0


class TestPropertyReport:
    """The thirteen-row property table."""

    def test_no_reports_leaves_every_row_insufficient(self):
        rows = property_report([])

        assert [r.property for r in rows] == list(PROPERTY_DEFINITIONS)
        assert len(rows) == 13
        assert all(r.status is PropertyStatus.INSUFFICIENT and r.value is None for r in rows)

    def test_durability_row_from_scenario_1(self):
        report = sealed(1, counters=ScenarioCounters(total_reads=3, correct_reads=3))

        rows = {r.property: r for r in property_report([report])}

        assert rows["durability"].value == 1.0
        assert rows["durability"].sufficient
        assert rows["durability"].evidence == ["scenario 1"]
        assert not rows["consistency"].sufficient

    def test_invalid_report_is_not_evidence(self):
        rows = {r.property: r for r in property_report([sealed(1, valid=False, abort_reason="worker died")])}

        assert rows["durability"].missing == ["scenario 1 (invalid)"]

    def test_last_valid_report_wins(self):
        first = sealed(1, counters=ScenarioCounters(total_reads=4, correct_reads=2))
        second = sealed(1, counters=ScenarioCounters(total_reads=4, correct_reads=4))

        rows = {r.property: r for r in property_report([first, second])}

        assert rows["durability"].value == 1.0

    def test_query_rows_average_recorded_latencies(self):
        records = [op("query:FT", 0.0, 0.2), op("query:FT", 1.0, 0.4), op("query:A1", 2.0, 1.0)]

        rows = {r.property: r for r in property_report([sealed(5, records=records)])}

        assert rows["full_text"].value == pytest.approx(0.3)
        assert rows["analysis"].value == 10.0
        assert "Q3" in rows["path_traversals"].missing

    def test_scaling_rows_compare_against_baseline(self):
        after = [sealed(4, seconds=30.0), sealed(5, seconds=10.0)]
        before = [sealed(4, seconds=20.0), sealed(5, seconds=20.0)]

        rows = {r.property: r for r in property_report(after, baseline=before)}

        assert rows["scale_up"].value == pytest.approx(1.0)
        assert rows["horizontal_scalability"].sufficient
        assert rows["elastic_speedup"].missing == ["scenario 2", "baseline scenario 2"]

    def test_availability_uses_survivable_removals(self):
        s3 = sealed(3, details={"survivable_removals": 2, "oracle_match": True})

        row = next(r for r in property_report([s3, sealed(6)]) if r.property == "availability")

        assert row.value == 2.0
        assert row.details["oracle_match"] is True


class TestExport:
    """Rendering and report files."""

    @pytest.fixture
    def rows(self):
        return property_report([sealed(1, counters=ScenarioCounters(total_reads=2, correct_reads=2))])

    def test_json(self, rows):
        payload = json.loads(export_table(rows, ExportFormat.JSON))

        assert set(payload) == {"schema_version", "properties", "metrics"}
        assert len(payload["properties"]) == 13

    def test_csv(self, rows):
        lines = export_table(rows, "csv").splitlines()

        assert lines[0] == "property,display_name,metric,value,unit,status,evidence,missing"
        assert len(lines) == 14

    def test_markdown_with_metrics(self, rows):
        report = sealed(1, counters=ScenarioCounters(total_reads=2, correct_reads=2))

        text = export_table(rows, ExportFormat.MARKDOWN, metric_sets([report], PRICING))

        assert "| Durability | durability ratio | 1 | ratio | ok | scenario 1 |" in text
        assert "| 1 | 10.000 |" in text

    def test_reports_round_trip_through_a_directory(self, tmp_path):
        write_report(sealed(1), tmp_path / "reports" / "s1.json")
        write_report(sealed(5), tmp_path / "reports" / "s5.json")

        reports = load_reports(tmp_path / "reports")

        assert [r.scenario_id for r in reports] == [1, 5]

    def test_unknown_schema_version(self, tmp_path):
        path = write_report(sealed(1, schema_version=99), tmp_path / "old.json")

        with pytest.raises(ReportStateException):
            load_report(path)

    def test_not_a_report(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text('{"hello": 1}')

        with pytest.raises(ReportStateException):
            load_report(path)


class TestPricingFile:
    """Provider rates from TOML."""

    def test_pricing_table(self, tmp_path):
        path = tmp_path / "pricing.toml"
        path.write_text('[pricing]\nprovider_name = "acme"\nper_node_hour_usd = 0.12\n')

        model = PricingModel.from_toml(path)

        assert model.provider_name == "acme"
        assert model.per_node_hour_usd == 0.12
        assert model.fixed_platform_usd == 0.0

    def test_top_level_rates(self, tmp_path):
        path = tmp_path / "pricing.toml"
        path.write_text("per_gb_egress_usd = 0.09\n")

        assert PricingModel.from_toml(path).per_gb_egress_usd == 0.09

    def test_negative_rate(self, tmp_path):
        path = tmp_path / "pricing.toml"
        path.write_text("per_node_hour_usd = -1\n")

        with pytest.raises(PricingConfigException) as exc_info:
            PricingModel.from_toml(path)

        assert exc_info.value.exit_code == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(PricingConfigException):
            PricingModel.from_toml(tmp_path / "absent.toml")
