"""Drivers for the seven benchmark scenarios.

Each driver turns the scenario's workload into workers, runs them on the
context's executor and seals a :class:`ScenarioReport` whose counters are
recomputed from the collected records.
"""

import itertools
import math
import threading
import time
from collections import Counter, deque
from typing import Callable, Deque, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..backend.exceptions import NotFoundException, UnavailableException
from ..backend.hashing import survivable_removals
from ..backend.interface import BackendInterface
from ..backend.models import VersionedValue, WriteAck
from ..corpus.models import Article
from ..generator.dataset import GeneratedCorpus
from ..generator.slicing import Slice, next_slice, take_slice
from ..logging_config import LoggingMixin, get_logger
from ..metadata.pipeline import MetadataStore, install
from ..queries.defaults import default_query_set
from ..queries.engine import QueryEngine
from ..queries.models import ANALYTIC_KINDS, QueryKind, QuerySpec
from .checks import DURABILITY_CHECK, EXPECTED_NOT_FOUND, REGRESSION, classify_reads, count_operations
from .context import BenchmarkContext, prepare_context
from .exceptions import ScenarioAbortedException, ScenarioPreconditionException
from .executor import Observation, PlannedOperation, Worker
from .models import SCENARIO_IDS, OperationRecord, ResourceUsage, ScenarioConfig, ScenarioReport

logger = get_logger(__name__)

ProgressCallback = Callable[[int, int, str], None]

FULL_TEXT_TERMS = ("obama", "star trek", "higgs", "cleopatra")
DURABILITY_KINDS = (QueryKind.Q4, QueryKind.Q7, QueryKind.Q14)
DURABILITY_ROW_KEYS: Dict[QueryKind, Tuple[str, ...]] = {
    QueryKind.Q4: ("keyword_id",),
    QueryKind.Q7: ("article_id",),
    QueryKind.Q14: ("older_article_id", "younger_article_id"),
}


# -- operation actions ----------------------------------------------------------------


def query_kind(spec: QuerySpec) -> str:
    return f"query:{spec.kind.value}"


def query_action(engine: QueryEngine, spec: QuerySpec, sink: Optional[Dict] = None):
    def action(start: float) -> Observation:
        result = engine.execute(spec)
        if sink is not None:
            sink[spec.kind] = result.rows
        return Observation(rows=len(result.rows))

    return action


def read_action(backend: BackendInterface, key: str, inspect: Optional[Callable[[VersionedValue], tuple]] = None):
    def action(start: float) -> Observation:
        value = backend.read(key)
        return Observation(
            version=value.version,
            served_sequence=value.sequence,
            committed_at=value.write_timestamp,
            flags=inspect(value) if inspect is not None else (),
        )

    return action


def _acknowledged(ack: WriteAck) -> Observation:
    return Observation(version=ack.version, served_sequence=ack.sequence, committed_at=ack.committed_at)


def update_action(backend: BackendInterface, key: str, body: str):
    return lambda start: _acknowledged(backend.update(key, body))


def full_text_specs() -> List[QuerySpec]:
    return [QuerySpec(kind=QueryKind.FT, term=term) for term in FULL_TEXT_TERMS]


def sequential(start: float, operations: Sequence[Tuple[str, Optional[str], Callable]], repetition: int = 0):
    """Plan running ``(kind, key, action)`` back to back from ``start``."""
    at = start
    for kind, key, action in operations:
        at = yield PlannedOperation(at, kind, key, action, repetition)


# -- report assembly ------------------------------------------------------------------


class ScenarioRun(LoggingMixin):
    """Collects records of one scenario and seals the report."""

    def __init__(self, context: BenchmarkContext, scenario_id: int, on_progress: Optional[ProgressCallback] = None):
        self.context = context
        self.scenario_id = scenario_id
        self.config = context.config.with_scenario(scenario_id)
        self.on_progress = on_progress
        self.records: List[OperationRecord] = []
        self.details: Dict = {}
        self._offsets: Dict[Tuple[int, str], int] = {}
        self.node_count = context.backend.live_node_count()
        self.started_at = context.clock.now()
        self._wall_started = time.perf_counter()

    @property
    def backend(self) -> BackendInterface:
        return self.context.backend

    @property
    def window(self) -> float:
        return self.config.cluster.staleness_window

    def progress(self, step: int, total: int, message: str) -> None:
        self.logger.debug("Scenario %d: %s (%d/%d)", self.scenario_id, message, step, total)
        if self.on_progress is not None:
            self.on_progress(step, total, message)

    def absorb(self, records: Sequence[OperationRecord]) -> List[OperationRecord]:
        """Append executor output, renumbering so a worker's sequence keeps growing across runs."""
        shifted = []
        for record in records:
            base = self._offsets.get((record.repetition, record.worker), 0)
            shifted.append(record if base == 0 else record.model_copy(update={"sequence": record.sequence + base}))
        for key, count in Counter((r.repetition, r.worker) for r in records).items():
            self._offsets[key] = self._offsets.get(key, 0) + count
        self.records.extend(shifted)
        return shifted

    def execute(self, workers: Sequence[Worker]) -> List[OperationRecord]:
        try:
            records = self.context.executor().run(workers)
        except ScenarioAbortedException as e:
            e.records = self.absorb(e.records)
            raise
        return self.absorb(records)

    def run_sequence(self, operations, worker: str = "runner") -> List[OperationRecord]:
        return self.execute([Worker(worker, sequential(self.context.clock.now(), operations))])

    def _resources(self) -> ResourceUsage:
        return ResourceUsage(
            node_count=self.node_count,
            stored_bytes=sum(node.stored_bytes for node in self.backend.status().nodes),
            egress_bytes=sum(r.bytes for r in self.records),
        )

    def seal(self, valid: bool = True, abort_reason: Optional[str] = None) -> ScenarioReport:
        records = sorted(self.records, key=lambda r: (r.start, r.worker, r.repetition, r.sequence))
        report = ScenarioReport(
            scenario_id=self.scenario_id,
            clock_mode=self.config.clock_mode,
            speedup=self.config.speedup,
            started_at=self.started_at,
            ended_at=max(self.context.clock.now(), max((r.end for r in records), default=self.started_at)),
            wall_seconds=time.perf_counter() - self._wall_started,
            counters=count_operations(self.scenario_id, records),
            resources=self._resources(),
            records=records,
            details=self.details,
            config=self.config.model_dump(mode="json"),
            sealed=True,
            valid=valid,
            abort_reason=abort_reason,
        )
        self.logger.info(
            "Scenario %d sealed: %d operations, %.3fs %s time%s",
            self.scenario_id, len(records), report.duration, self.config.clock_mode.value,
            "" if valid else f" (invalid: {abort_reason})",
        )
        return report


def grow(run: ScenarioRun, data: Slice) -> Tuple[OperationRecord, OperationRecord]:
    """Load ``data`` and refresh the metadata incrementally."""
    context = run.context

    def load(start: float) -> Observation:
        report = context.backend.bulk_load(data)
        context.note_loaded(data)
        return Observation(rows=report.articles)

    def index(start: float) -> Observation:
        store = context.pipeline.incremental_update(context.backend, context.store or MetadataStore.empty(), data)
        install(context.backend, store)
        context.store = store
        return Observation(rows=store.document_count)

    key = f"{data.from_fraction:.4f}-{data.to_fraction:.4f}"
    load_record, index_record = run.run_sequence([("load", key, load), ("index", key, index)])
    return load_record, index_record


# -- scenario 1: durability -----------------------------------------------------------


def _covers(baseline: dict, after: dict) -> bool:
    for field, value in baseline.items():
        if field == "rank":
            continue
        current = after.get(field)
        if isinstance(value, list):
            if not set(value) <= set(current or ()):
                return False
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            if current is None or current < value:
                return False
        elif current != value:
            return False
    return True


def missing_rows(kind: QueryKind, baseline: List[dict], after: List[dict]) -> int:
    """Baseline rows absent from ``after`` or shrunk in it."""
    fields = DURABILITY_ROW_KEYS[kind]
    index = {tuple(row[f] for f in fields): row for row in after}
    return sum(
        1 for row in baseline
        if (match := index.get(tuple(row[f] for f in fields))) is None or not _covers(row, match)
    )


def durability_specs(config: ScenarioConfig, day) -> List[QuerySpec]:
    return [
        QuerySpec(kind=QueryKind.Q4, on_date=day, limit=None),
        QuerySpec(kind=QueryKind.Q7, on_date=day, limit=None),
        QuerySpec(kind=QueryKind.Q14, year=day.year - config.birth_year_offset, limit=None),
    ]


def _scenario_1(run: ScenarioRun) -> None:
    context, config = run.context, run.config
    if context.loaded_fraction <= 0.0:
        raise ScenarioPreconditionException(1, "nothing is loaded; the durability baseline needs data")
    first, second = config.durability_dates
    data = next_slice(context.corpus, context.loaded_fraction, context.loaded_fraction)
    before_articles = context.backend.article_count()

    def run_queries(phase: str, day) -> Dict[QueryKind, List[dict]]:
        sink: Dict[QueryKind, List[dict]] = {}
        key = f"{phase}@{day.isoformat()}"
        run.run_sequence([
            (query_kind(spec), key, query_action(context.engine, spec, sink))
            for spec in durability_specs(config, day)
        ])
        return sink

    baseline = run_queries("baseline", first)
    run.progress(1, 4, f"baseline queries at {first}")
    grow(run, data)
    run.progress(2, 4, f"dataset doubled to {context.loaded_fraction:.2f} of the corpus")
    after_first = run_queries("after", first)
    after_second = run_queries("after", second)
    run.progress(3, 4, "queries re-run")

    now = context.clock.now()
    checks = []
    for sequence, kind in enumerate(DURABILITY_KINDS):
        rows = baseline.get(kind)
        flags: Tuple[str, ...] = ()
        if rows is None or kind not in after_first:
            success = False
            flags = ("query-failed",)
        else:
            missing = missing_rows(kind, rows, after_first[kind])
            success = missing == 0
            if missing:
                flags = ("missing-rows",)
            elif not rows:
                flags = ("empty-baseline",)
        checks.append(OperationRecord(
            worker="durability", sequence=sequence, kind=DURABILITY_CHECK, key=f"{kind.value}@{first.isoformat()}",
            start=now, end=now, success=success, outcome="ok" if success else "mismatch",
            rows=len(rows or ()), flags=flags,
        ))
    run.records.extend(checks)
    run.progress(4, 4, "durability checked")

    run.details.update({
        "dates": [first.isoformat(), second.isoformat()],
        "articles_before": before_articles,
        "articles_after": context.backend.article_count(),
        "added_bytes": data.byte_size,
        "baseline_rows": {k.value: len(v) for k, v in baseline.items()},
        "after_rows": {
            first.isoformat(): {k.value: len(v) for k, v in after_first.items()},
            second.isoformat(): {k.value: len(v) for k, v in after_second.items()},
        },
    })


# -- scenario 2: consistency ----------------------------------------------------------


def _target_article(run: ScenarioRun) -> str:
    target = run.config.target_article
    if target is None:
        first = min((a.id for a in run.backend.scan_articles()), default=None)
        if first is None:
            raise ScenarioPreconditionException(2, "no article is loaded")
        target = first
    return target


def _scenario_2(run: ScenarioRun) -> None:
    context, config = run.context, run.config
    backend = context.backend
    key = _target_article(run)
    try:
        original = backend.read(key).payload.body
    except NotFoundException:
        raise ScenarioPreconditionException(2, f"target article {key} is not loaded") from None

    t0 = context.clock.now()
    reads = int(round(config.read_rate * config.consistency_duration_s))

    def reader():
        newest = 0

        def inspect(value: VersionedValue) -> tuple:
            nonlocal newest
            if value.sequence < newest:
                return (REGRESSION,)
            newest = value.sequence
            return ()

        for i in range(reads):
            yield PlannedOperation(t0 + i / config.read_rate, "read", key, read_action(backend, key, inspect))

    def writer():
        k = 1
        while k * config.update_interval_s < config.consistency_duration_s:
            body = f"{original}\n\n[revision {k}]"
            yield PlannedOperation(t0 + k * config.update_interval_s, "update", key, update_action(backend, key, body))
            k += 1

    run.progress(0, 1, f"reading {key} at {config.read_rate:g}/s")
    run.execute([Worker("reader-0", reader()), Worker("writer-0", writer())])
    run.records = classify_reads(run.records, run.window)
    run.progress(1, 1, "trace classified")
    run.details.update({
        "target_article": key,
        "updates": sum(1 for r in run.records if r.kind == "update"),
        "staleness_window_s": run.window,
    })


# -- scenario 3: availability ---------------------------------------------------------


def removal_order(nodes: Sequence[str], seed: int, stream: int = 3) -> List[str]:
    rng = np.random.default_rng([seed, stream])
    return [nodes[i] for i in rng.permutation(len(nodes))]


def enumerate_orders(nodes: Sequence[str], limit: int, seed: int) -> List[Tuple[str, ...]]:
    """Every removal order when there are at most ``limit``, else ``limit`` seeded ones."""
    if math.factorial(len(nodes)) <= limit:
        return list(itertools.permutations(nodes))
    return [tuple(removal_order(nodes, seed, stream=1000 + i)) for i in range(limit)]


def _scenario_3(run: ScenarioRun) -> None:
    context, config = run.context, run.config
    backend = context.backend
    nodes = sorted(backend.status().live_nodes)
    order = removal_order(nodes, config.seed)
    specs = default_query_set(backend, now=context.current_date()) + full_text_specs()
    shard_map = getattr(backend, "shard_map", None)
    data_shards = backend.data_shards() if hasattr(backend, "data_shards") else None
    state = {"unavailable": False, "killed": [], "survived": 0, "rounds": 0}

    def tracked(spec: QuerySpec):
        inner = query_action(context.engine, spec)

        def action(start: float) -> Observation:
            try:
                return inner(start)
            except UnavailableException:
                state["unavailable"] = True
                raise

        return action

    def kill(node: str):
        def action(start: float) -> Observation:
            status = backend.kill_node(node)
            state["killed"].append(node)
            unreachable = set(status.unreachable_shards)
            keys = 0
            if unreachable and shard_map is not None:
                keys = sum(1 for key in backend.article_ids() if shard_map.shard_of(key) in unreachable)
            return Observation(rows=keys)

        return action

    def plan():
        at = context.clock.now()
        removed = 0
        while True:
            state["unavailable"] = False
            state["rounds"] += 1
            for spec in specs:
                at = yield PlannedOperation(at, query_kind(spec), f"removed-{removed}", tracked(spec))
            run.progress(removed + 1, len(order) + 1, f"round with {removed} nodes removed")
            if state["unavailable"]:
                return
            state["survived"] = removed
            if removed == len(order):
                return
            at = yield PlannedOperation(at, "kill", order[removed], kill(order[removed]))
            removed += 1

    try:
        run.execute([Worker("searcher-0", plan())])
    finally:
        for node in state["killed"]:
            backend.recover_node(node)

    details = {
        "kill_order": order,
        "rounds": state["rounds"],
        "survivable_removals": state["survived"],
        "oracle_survivable": None,
        "oracle_match": None,
        "orders_checked": 0,
        "oracle_min": None,
        "oracle_max": None,
    }
    if shard_map is not None:
        oracle = survivable_removals(shard_map, order, data_shards)
        outcomes = [
            survivable_removals(shard_map, candidate, data_shards)
            for candidate in enumerate_orders(nodes, config.removal_orders_checked, config.seed)
        ]
        details.update({
            "oracle_survivable": oracle,
            "oracle_match": oracle == state["survived"],
            "orders_checked": len(outcomes),
            "oracle_min": min(outcomes),
            "oracle_max": max(outcomes),
        })
    run.details.update(details)


# -- scenario 4: concurrency ----------------------------------------------------------


class _InsertRegistry:
    """Ids inserted so far, shared by mutators and readers."""

    def __init__(self):
        self._ids: List[str] = []
        self._lock = threading.Lock()

    def add(self, article_id: str) -> None:
        with self._lock:
            self._ids.append(article_id)

    def snapshot(self) -> List[str]:
        with self._lock:
            return list(self._ids)


def read_slots(queries: int, reads: int) -> Counter:
    """How many point reads go before each query of a set."""
    if reads <= 0:
        return Counter()
    return Counter((j * queries) // reads for j in range(reads))


def _scenario_4(run: ScenarioRun) -> None:
    context, config = run.context, run.config
    backend = context.backend
    specs = default_query_set(backend, now=context.current_date())
    originals: Dict[str, str] = {a.id: a.body for a in backend.scan_articles()}
    corpus_keys = sorted(originals)
    authors = list(backend.list_entities("author"))
    if not corpus_keys or not authors:
        raise ScenarioPreconditionException(4, "no articles or authors loaded")
    registry = _InsertRegistry()
    period = 1.0 / config.mutation_rate
    per_stream = max(1, int(round(config.mutation_rate * config.mutation_duration_s)))
    slots = read_slots(len(specs), config.point_reads_per_set)

    def query_plan(rep: int, worker: int, t0: float):
        rng = np.random.default_rng([config.seed, 4, rep, 1000 + worker])
        at = t0
        for position, spec in enumerate(specs):
            for _ in range(slots[position]):
                inserted = registry.snapshot()
                if inserted and rng.random() < 0.5:
                    key = inserted[int(rng.integers(len(inserted)))]
                else:
                    key = corpus_keys[int(rng.integers(len(corpus_keys)))]
                at = yield PlannedOperation(at, "read", key, read_action(backend, key), rep)
            at = yield PlannedOperation(at, query_kind(spec), None, query_action(context.engine, spec), rep)

    def mutation_plan(rep: int, worker: int, t0: float):
        rng = np.random.default_rng([config.seed, 4, rep, worker])
        partition = corpus_keys[worker::config.mutation_workers] or corpus_keys
        own: Deque[str] = deque()

        def insert(article: Article):
            def action(start: float) -> Observation:
                ack = backend.write(article)
                own.append(article.id)
                registry.add(article.id)
                return _acknowledged(ack)

            return action

        for i in range(per_stream):
            base = t0 + i * period
            key = partition[int(rng.integers(len(partition)))]
            body = f"{originals[key]}\n\n[revision {rep}.{worker}.{i}]"
            yield PlannedOperation(base, "update", key, update_action(backend, key, body), rep)

            sequence = (rep * config.mutation_workers + worker) * per_stream + i
            author = authors[int(rng.integers(len(authors)))]
            article = context.generator.synthesize_article(sequence, author, context.current_date())
            yield PlannedOperation(base + period / 3, "insert", article.id, insert(article), rep)

            if own:
                victim = own.popleft()
                yield PlannedOperation(
                    base + 2 * period / 3, "delete", victim,
                    lambda start, victim=victim: _acknowledged(backend.delete(victim)), rep,
                )

    for rep in range(config.repetitions):
        t0 = context.clock.now()
        workers = [Worker(f"query-{q}", query_plan(rep, q, t0)) for q in range(config.query_workers)]
        workers += [Worker(f"mutator-{m}", mutation_plan(rep, m, t0)) for m in range(config.mutation_workers)]
        run.execute(workers)
        run.progress(rep + 1, config.repetitions, f"repetition {rep + 1}")

    run.records = classify_reads(run.records, run.window)
    counters = count_operations(4, run.records)
    run.details.update({
        "repetitions": config.repetitions,
        "query_workers": config.query_workers,
        "mutation_workers": config.mutation_workers,
        "inconsistencies": counters.total_ops - counters.successful_ops,
        "expected_not_found": sum(1 for r in run.records if EXPECTED_NOT_FOUND in r.flags),
        "mutation_rate_measured": measured_rate(run.records, "update"),
    })


def measured_rate(records: Sequence[OperationRecord], kind: str) -> Optional[float]:
    """Mean per-stream rate of ``kind`` operations, from their start times."""
    starts: Dict[Tuple[int, str], List[float]] = {}
    for record in records:
        if record.kind == kind:
            starts.setdefault((record.repetition, record.worker), []).append(record.start)
    rates = [
        (len(times) - 1) / (max(times) - min(times))
        for times in starts.values()
        if len(times) > 1 and max(times) > min(times)
    ]
    return float(np.mean(rates)) if rates else None


# -- scenario 5: analysis -------------------------------------------------------------


def analytic_sequence(count: int, seed: int) -> List[QueryKind]:
    rng = np.random.default_rng([seed, 5])
    return [ANALYTIC_KINDS[i] for i in rng.integers(len(ANALYTIC_KINDS), size=count)]


def _scenario_5(run: ScenarioRun) -> None:
    context, config = run.context, run.config
    kinds = analytic_sequence(config.analytic_executions, config.seed)
    specs = [QuerySpec(kind=kind) for kind in kinds] + full_text_specs()
    run.progress(0, 1, f"{len(kinds)} analytical queries")
    run.run_sequence([(query_kind(spec), None, query_action(context.engine, spec)) for spec in specs])
    run.progress(1, 1, "analysis done")

    latencies: Dict[str, List[float]] = {}
    for record in run.records:
        latencies.setdefault(record.kind, []).append(record.latency)
    run.details.update({
        "sequence": [k.value for k in kinds],
        "executions": dict(Counter(k.value for k in kinds)),
        "mean_latency": {kind: float(np.mean(values)) for kind, values in sorted(latencies.items())},
    })


# -- scenario 6: initialization -------------------------------------------------------


def _scenario_6(run: ScenarioRun) -> None:
    context, config = run.context, run.config
    backend = context.backend
    if not backend.is_empty():
        raise ScenarioPreconditionException(6, "storage is not empty; initialization starts from an empty system")
    data = take_slice(context.corpus, 0.0, config.initial_fraction)

    def load(start: float) -> Observation:
        report = backend.bulk_load(data)
        context.note_loaded(data)
        return Observation(rows=report.articles)

    def index(start: float) -> Observation:
        store = context.pipeline.build(backend)
        install(backend, store)
        context.store = store
        return Observation(rows=store.document_count)

    key = f"0.0000-{data.to_fraction:.4f}"
    load_record, index_record = run.run_sequence([("load", key, load), ("index", key, index)])
    run.progress(1, 2, "initialized")
    run.run_sequence([(query_kind(spec), None, query_action(context.engine, spec)) for spec in full_text_specs()])
    run.progress(2, 2, "full-text searches done")
    run.details.update({
        "articles_loaded": load_record.rows,
        "loaded_bytes": data.byte_size,
        "expected_articles": len(data),
        "indexed_documents": index_record.rows,
        "initialization_seconds": index_record.end - load_record.start,
    })


# -- scenario 7: scale up -------------------------------------------------------------


def _scenario_7(run: ScenarioRun) -> None:
    context, config = run.context, run.config
    if context.loaded_fraction <= 0.0:
        raise ScenarioPreconditionException(7, "nothing is loaded; scale-up starts from a consistent loaded state")
    delta = config.delta_fraction if config.delta_fraction is not None else context.loaded_fraction
    before = context.loaded_fraction
    data = next_slice(context.corpus, before, delta)
    run.details.update({"loaded_before": before, "delta_fraction": delta})
    if data.is_empty:
        run.details.update({"added_bytes": 0, "added_articles": 0, "recompute_seconds": 0.0})
        run.progress(1, 1, "nothing to add")
        return
    load_record, index_record = grow(run, data)
    run.progress(1, 1, f"loaded {len(data)} more articles")
    run.details.update({
        "added_bytes": data.byte_size,
        "added_articles": load_record.rows,
        "recompute_seconds": index_record.latency,
        "loaded_after": context.loaded_fraction,
        "metadata_digest": context.store.digest() if context.store is not None else None,
    })


# -- entry points ---------------------------------------------------------------------


_DRIVERS: Dict[int, Callable[[ScenarioRun], None]] = {
    1: _scenario_1,
    2: _scenario_2,
    3: _scenario_3,
    4: _scenario_4,
    5: _scenario_5,
    6: _scenario_6,
    7: _scenario_7,
}


ScenarioTarget = Union[BenchmarkContext, ScenarioConfig]


def _context_for(scenario_id: int, target: ScenarioTarget) -> BenchmarkContext:
    if isinstance(target, BenchmarkContext):
        return target
    return prepare_context(target.with_scenario(scenario_id), load=scenario_id != 6)


def _run(scenario_id: int, target: ScenarioTarget, on_progress: Optional[ProgressCallback]) -> ScenarioReport:
    run = ScenarioRun(_context_for(scenario_id, target), scenario_id, on_progress)
    logger.info("Scenario %d started (%s clock)", scenario_id, run.config.clock_mode.value)
    try:
        _DRIVERS[scenario_id](run)
    except ScenarioAbortedException as e:
        logger.error("Scenario %d aborted: %s", scenario_id, e.message)
        return run.seal(valid=False, abort_reason=e.message)
    return run.seal()


def run_scenario_1(context: ScenarioTarget, on_progress: Optional[ProgressCallback] = None) -> ScenarioReport:
    """Durability: Q4, Q7, Q14 before and after doubling the data.

    Every ``run_scenario_N`` takes either a prepared :class:`BenchmarkContext`,
    which it mutates, or a :class:`ScenarioConfig`, from which it prepares a
    fresh context (generated corpus, new cluster, initial slice loaded and
    indexed; Scenario 6 starts empty).
    """
    return _run(1, context, on_progress)


def run_scenario_2(context: ScenarioTarget, on_progress: Optional[ProgressCallback] = None) -> ScenarioReport:
    """Consistency: one reader and one writer on a single article.

    ``context`` is a prepared context or a config, as for :func:`run_scenario_1`.
    """
    return _run(2, context, on_progress)


def run_scenario_3(context: ScenarioTarget, on_progress: Optional[ProgressCallback] = None) -> ScenarioReport:
    """Availability: remove nodes until a query hits unreachable data.

    Nodes killed on a passed-in context are recovered before returning.
    """
    return _run(3, context, on_progress)


def run_scenario_4(context: ScenarioTarget, on_progress: Optional[ProgressCallback] = None) -> ScenarioReport:
    """Concurrency: query workers against mutation workers, repeated."""
    return _run(4, context, on_progress)


def run_scenario_5(context: ScenarioTarget, on_progress: Optional[ProgressCallback] = None) -> ScenarioReport:
    """Analysis: a seeded uniform sequence of A1-A4."""
    return _run(5, context, on_progress)


def run_scenario_6(context: ScenarioTarget, on_progress: Optional[ProgressCallback] = None) -> ScenarioReport:
    """Initialization of an empty backend; a config gets a context with nothing loaded."""
    return _run(6, context, on_progress)


def run_scenario_7(context: ScenarioTarget, on_progress: Optional[ProgressCallback] = None) -> ScenarioReport:
    return _run(7, context, on_progress)


def run_scenario(
    config: ScenarioConfig,
    context: Optional[BenchmarkContext] = None,
    corpus: Optional[GeneratedCorpus] = None,
    on_progress: Optional[ProgressCallback] = None,
) -> ScenarioReport:
    """Run ``config.scenario_id`` on ``context``, preparing a fresh one when absent.

    Scenario 6 gets an empty backend; every other scenario starts with the
    first ``1 / corpus_multiplier`` of the corpus loaded and indexed.
    """
    if context is None:
        context = prepare_context(config, corpus=corpus, load=config.scenario_id != 6)
    return _run(config.scenario_id, context, on_progress)


def run_all(
    config: ScenarioConfig,
    scenario_ids: Sequence[int] = SCENARIO_IDS,
    on_progress: Optional[ProgressCallback] = None,
) -> List[ScenarioReport]:
    """Each scenario on its own fresh context over one shared corpus."""
    corpus: Optional[GeneratedCorpus] = None
    reports = []
    for scenario_id in scenario_ids:
        scenario_config = config.with_scenario(scenario_id)
        context = prepare_context(scenario_config, corpus=corpus, load=scenario_id != 6)
        corpus = context.corpus
        reports.append(_run(scenario_id, context, on_progress))
    return reports
