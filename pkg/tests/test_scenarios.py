"""Tests for the clocks, the executors, trace checks and the seven scenario drivers."""

import time
from collections import Counter

import pytest
from scipy import stats

from src.backend.exceptions import NotFoundException
from src.backend.meter import CostModel
from src.backend.models import ClusterConfig
from src.generator.slicing import take_slice
from src.metadata.pipeline import MetadataPipeline
from src.metrics.calculator import concurrency_ratio
from src.queries.models import ANALYTIC_KINDS
from src.scenarios.checks import (
    DURABILITY_CHECK,
    EXPECTED_NOT_FOUND,
    STALE,
    audit_report,
    classify_read,
    committed_writes,
    count_operations,
    replay_concurrency,
    replay_consistency,
)
from src.scenarios.clock import VirtualClock
from src.scenarios.context import prepare_context
from src.scenarios.exceptions import ClockConfigException, ScenarioAbortedException, ScenarioPreconditionException
from src.scenarios.executor import Observation, VirtualExecutor, Worker
from src.scenarios.models import OperationRecord, ScenarioConfig, ScenarioCounters, ScenarioReport
from src.scenarios.runner import (
    analytic_sequence,
    enumerate_orders,
    full_text_specs,
    read_slots,
    removal_order,
    run_all,
    run_scenario_1,
    run_scenario_2,
    run_scenario_3,
    run_scenario_4,
    run_scenario_5,
    run_scenario_6,
    run_scenario_7,
    sequential,
)

from .conftest import FAST_PIPELINE


def scenario_config(corpus, **overrides) -> ScenarioConfig:
    """Small workloads over the shared fixture corpus."""
    values = dict(
        seed=7,
        generator=corpus.config,
        cluster=ClusterConfig(nodes=5, replication_factor=3, seed=7),
        pipeline=FAST_PIPELINE,
        read_rate=20.0,
        update_interval_s=1.0,
        consistency_duration_s=10.0,
        repetitions=2,
        query_workers=2,
        mutation_workers=2,
        mutation_rate=5.0,
        point_reads_per_set=3,
        analytic_executions=8,
    )
    values.update(overrides)
    return ScenarioConfig(**values)


def eventual_cluster(window_ms: float = 500.0) -> ClusterConfig:
    return ClusterConfig(nodes=5, replication_factor=3, seed=7, consistency="eventual", staleness_window_ms=window_ms)


def record(kind="read", key="art-00000001", start=0.0, end=None, **fields) -> OperationRecord:
    return OperationRecord(worker="w", sequence=0, kind=kind, key=key, start=start, end=start if end is None else end,
                           **fields)


class SingleNodeBackend:
    """Just enough backend for the executor's cost model."""

    def live_node_count(self) -> int:
        return 1


class TestVirtualClock:
    def test_only_moves_forward(self):
        clock = VirtualClock()
        clock.advance_to(2.0)
        clock.advance_to(1.0)
        clock.advance(0.5)

        assert clock.now() == 2.5

    def test_speedup_below_one_is_a_config_error(self):
        with pytest.raises(ClockConfigException) as exc_info:
            VirtualClock(speedup=0.5)

        assert exc_info.value.exit_code == 3
        assert exc_info.value.error_class == "config"
        assert exc_info.value.speedup == 0.5


class TestVirtualExecutor:
    """Discrete-event ordering and timing."""

    @pytest.fixture
    def executor(self):
        cost = CostModel(base_latency_s=0.002, per_article_s=0.0, bandwidth_bytes_per_s=1e9)
        return VirtualExecutor(VirtualClock(), SingleNodeBackend(), cost)

    def test_operations_run_in_time_order(self, executor):
        ok = lambda start: Observation()
        workers = [
            Worker("a", sequential(0.0, [("read", "k1", ok), ("read", "k2", ok)])),
            Worker("b", sequential(0.001, [("read", "k3", ok)])),
        ]

        records = executor.run(workers)

        assert [r.key for r in records] == ["k1", "k3", "k2"]
        assert [r.start for r in records] == pytest.approx([0.0, 0.001, 0.002])
        assert all(r.latency == pytest.approx(0.002) for r in records)
        assert executor.clock.now() == pytest.approx(0.004)

    def test_benchmark_errors_become_failed_operations(self, executor):
        def missing(start):
            raise NotFoundException("art-00000404")

        records = executor.run([Worker("a", sequential(0.0, [("read", "art-00000404", missing)]))])

        assert records[0].outcome == "not-found"
        assert not records[0].success

    def test_unexpected_errors_abort_with_partial_trace(self, executor):
        def broken(start):
            raise ZeroDivisionError("boom")

        plan = sequential(0.0, [("read", "k1", lambda start: Observation()), ("read", "k2", broken)])

        with pytest.raises(ScenarioAbortedException) as exc_info:
            executor.run([Worker("a", plan)])

        assert [r.key for r in exc_info.value.records] == ["k1"]
        assert exc_info.value.exit_code == 5


class TestTraceChecks:
    """Read classification, counters and audits over hand-built traces."""

    @pytest.fixture
    def writes(self):
        trace = [
            record("update", start=1.0, served_sequence=2, committed_at=1.0),
            record("delete", start=2.0, served_sequence=3, committed_at=2.0),
        ]
        return committed_writes(trace)

    def test_read_past_window_serving_old_commit_is_stale(self, writes):
        read = record(start=1.6, served_sequence=1)

        assert STALE in classify_read(read, writes, 0.5)[1]

    def test_read_inside_window_is_not_stale(self, writes):
        read = record(start=1.4, served_sequence=1)

        assert classify_read(read, writes, 0.5) == (True, ())

    def test_not_found_after_committed_delete_is_expected(self, writes):
        read = record(start=2.05, end=2.1, outcome="not-found", success=False)

        assert classify_read(read, writes, 0.0) == (True, (EXPECTED_NOT_FOUND,))

    def test_not_found_before_delete_is_a_failure(self, writes):
        read = record(start=1.8, end=1.9, outcome="not-found", success=False)

        assert classify_read(read, writes, 0.0) == (False, ())

    def test_durability_counters_come_from_check_records(self):
        trace = [
            record("query:Q4", key=None),
            record(DURABILITY_CHECK, key="Q4@2001-09-12"),
            record(DURABILITY_CHECK, key="Q7@2001-09-12", success=False, outcome="mismatch"),
        ]

        counters = count_operations(1, trace)

        assert (counters.total_reads, counters.correct_reads, counters.total_ops) == (2, 1, 1)

    def test_audit_flags_tampered_counters(self):
        report = ScenarioReport(
            scenario_id=2,
            clock_mode="virtual",
            records=[record(served_sequence=1), record(start=1.0, served_sequence=1)],
            counters=ScenarioCounters(total_reads=5),
            sealed=True,
        )

        result = audit_report(report)

        assert not result.ok
        assert result.mismatches["total_reads"] == (5, 2)

    def test_fingerprint_ignores_wall_time(self):
        report = ScenarioReport(scenario_id=5, clock_mode="virtual", records=[record()], sealed=True)
        slower = report.model_copy(update={"wall_seconds": 99.0})

        assert slower.fingerprint() == report.fingerprint()
        assert ScenarioReport.from_json(report.to_json()) == report


class TestWorkloadHelpers:
    def test_read_slots_spread_reads_over_queries(self):
        slots = read_slots(14, 5)

        assert sum(slots.values()) == 5
        assert max(slots.values()) == 1

    def test_removal_order_is_a_seeded_permutation(self):
        nodes = [f"node-{i:02d}" for i in range(5)]

        assert sorted(removal_order(nodes, 42)) == nodes
        assert removal_order(nodes, 42) == removal_order(nodes, 42)

    def test_small_clusters_enumerate_every_order(self):
        nodes = ["a", "b", "c"]

        assert len(enumerate_orders(nodes, 120, 1)) == 6
        assert len(enumerate_orders([f"n{i}" for i in range(6)], 10, 1)) == 10

    def test_analytic_sequence_is_seeded(self):
        assert analytic_sequence(20, 3) == analytic_sequence(20, 3)
        assert len(analytic_sequence(0, 3)) == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_analytic_sequence_is_uniform_over_kinds(self, seed):
        sequence = analytic_sequence(10_000, seed)
        counts = Counter(sequence)

        assert set(counts) == set(ANALYTIC_KINDS)
        assert stats.chisquare([counts[kind] for kind in ANALYTIC_KINDS]).pvalue > 0.001


@pytest.mark.slow
class TestScenarioRuns:
    """Each scenario driver end to end on the virtual clock."""

    def test_durability(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)

        report = run_scenario_1(context)

        assert report.sealed and report.valid
        assert report.counters.total_reads == 3
        assert report.counters.correct_reads == 3
        assert report.details["baseline_rows"]["Q4"] > 0
        assert report.details["articles_after"] > report.details["articles_before"]

    def test_durability_needs_loaded_data(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus, load=False)

        with pytest.raises(ScenarioPreconditionException) as exc_info:
            run_scenario_1(context)

        assert exc_info.value.exit_code == 4

    def test_consistency_under_strong_replication(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)

        report = run_scenario_2(context)

        assert report.counters.total_reads == 200
        assert report.counters.consistent_reads == report.counters.total_reads
        assert report.details["updates"] == 9

    def test_consistency_under_eventual_replication(self, corpus):
        config = scenario_config(corpus, cluster=eventual_cluster())

        report = run_scenario_2(prepare_context(config, corpus=corpus))
        replay = replay_consistency(report)

        assert audit_report(report).ok
        assert report.counters.stale_reads == 0
        assert replay.regressions == report.counters.regressions
        assert report.details["staleness_window_s"] == 0.5

    def test_consistency_runs_are_reproducible(self, corpus):
        config = scenario_config(corpus, cluster=eventual_cluster())

        first = run_scenario_2(prepare_context(config, corpus=corpus))
        second = run_scenario_2(prepare_context(config, corpus=corpus))

        assert first.fingerprint() == second.fingerprint()

    def test_availability_matches_oracle(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)

        report = run_scenario_3(context)
        details = report.details

        assert details["oracle_match"] is True
        assert details["orders_checked"] == 120
        assert details["oracle_min"] <= details["survivable_removals"] <= details["oracle_max"]
        assert details["survivable_removals"] >= 2
        assert report.counters.unreachable_keys > 0
        assert context.backend.live_node_count() == 5

    def test_concurrency(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)

        report = run_scenario_4(context)
        replay = replay_concurrency(report)

        assert audit_report(report).ok
        assert replay.inconsistencies == report.details["inconsistencies"] == 0
        assert replay.total_ops == report.counters.total_ops
        assert report.details["mutation_rate_measured"] == pytest.approx(5.0, rel=0.1)
        assert {r.repetition for r in report.records} == {0, 1}

    def test_analysis(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)

        report = run_scenario_5(context)

        assert len(report.details["sequence"]) == 8
        assert report.counters.total_ops == 8 + 4
        assert report.counters.successful_ops == report.counters.total_ops

    def test_initialization(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus, load=False)

        report = run_scenario_6(context)

        assert report.details["articles_loaded"] == report.details["expected_articles"] > 0
        assert report.details["indexed_documents"] >= report.details["articles_loaded"]
        assert report.details["initialization_seconds"] > 0
        assert len(report.records) == 2 + 4

    def test_initialization_needs_empty_storage(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)

        with pytest.raises(ScenarioPreconditionException):
            run_scenario_6(context)

    def test_scale_up_loads_the_rest(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)

        report = run_scenario_7(context)

        assert report.details["loaded_before"] == 0.5
        assert report.details["loaded_after"] == 1.0
        assert context.backend.article_count() == corpus.article_count
        full = MetadataPipeline(FAST_PIPELINE).build(context.backend)
        assert report.details["metadata_digest"] == full.digest()


@pytest.mark.slow
class TestScenarioProperties:
    """Longer runs checked against independent recomputation."""

    def test_config_target_prepares_a_fresh_context(self, corpus):
        config = scenario_config(corpus, analytic_executions=4)

        report = run_scenario_5(config)

        assert report.scenario_id == 5
        assert report.sealed and report.valid
        assert report.counters.total_ops == 4 + len(full_text_specs())
        assert report.counters.successful_ops == report.counters.total_ops

    def test_durability_doubles_the_loaded_bytes(self, corpus):
        context = prepare_context(scenario_config(corpus), corpus=corpus)
        initial = take_slice(corpus, 0.0, context.loaded_fraction)
        largest_unit = max(entry.byte_size for entry in corpus.manifest.units)

        report = run_scenario_1(context)
        details = report.details

        assert details["articles_before"] == len(initial)
        assert details["articles_after"] == len(take_slice(corpus, 0.0, 2 * context.config.initial_fraction))
        assert details["articles_after"] == corpus.article_count
        assert initial.byte_size + details["added_bytes"] == corpus.manifest.total_bytes
        assert abs(details["added_bytes"] - initial.byte_size) <= 2 * largest_unit

    def test_eventual_regressions_match_an_independent_replay(self, corpus):
        config = scenario_config(corpus, cluster=eventual_cluster(), read_rate=100.0)

        report = run_scenario_2(prepare_context(config, corpus=corpus))

        newest, regressions = 0, 0
        for read in sorted(report.records_of("read"), key=lambda r: r.start):
            if read.outcome != "ok":
                continue
            if read.served_sequence < newest:
                regressions += 1
            newest = max(newest, read.served_sequence)
        assert report.counters.total_reads == 1000
        assert regressions > 0
        assert report.counters.regressions == regressions
        assert report.counters.consistent_reads == report.counters.total_reads - regressions

    def test_paced_run_takes_virtual_time_over_speedup(self, corpus):
        config = scenario_config(corpus, speedup=60.0, consistency_duration_s=120.0, read_rate=20.0)
        context = prepare_context(config, corpus=corpus)

        started = time.monotonic()
        report = run_scenario_2(context)
        elapsed = time.monotonic() - started

        assert report.duration == pytest.approx(120.0, abs=1.0)
        assert report.speedup == 60.0
        assert 1.9 <= elapsed < 30.0
        assert report.counters.total_reads == 2400

    def test_three_hundred_repetitions_stay_consistent(self, corpus):
        config = scenario_config(
            corpus, repetitions=300, query_workers=1, mutation_workers=1, mutation_rate=2.0, point_reads_per_set=2,
        )

        report = run_scenario_4(prepare_context(config, corpus=corpus))
        replay = replay_concurrency(report)

        assert {r.repetition for r in report.records} == set(range(300))
        assert len(report.records_of("update")) == 300 * 2
        assert audit_report(report).ok
        assert replay.inconsistencies == 0
        assert concurrency_ratio(report).value == 1.0

    def test_full_run_is_bit_identical_when_repeated(self, corpus):
        config = scenario_config(corpus, repetitions=1, analytic_executions=4)

        first = run_all(config)
        second = run_all(config)

        assert [r.scenario_id for r in first] == list(range(1, 8))
        assert [r.fingerprint() for r in first] == [r.fingerprint() for r in second]
