"""Reference backend: a simulated replicated cluster in one process.

Articles are placed on a consistent-hash ring and tracked as per-key commit
logs. Replication is deterministic placement, not a protocol: a replica of a
shard "has" a version once its modeled apply lag has elapsed. Under strong
consistency every read serves the newest commit; under eventual consistency
a read picks a live replica and serves the newest commit that replica has
applied, which is never older than the staleness window allows.
"""

import hashlib
import itertools
import threading
import time
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

import numpy as np

from ..corpus.models import Article, Entity, MediaRef, ReferenceEntity, entity_kind
from ..corpus.xml_codec import find_dangling_references
from ..corpus.exceptions import DanglingReferenceException
from ..logging_config import LoggingMixin
from .exceptions import ConflictException, IndexNotBuiltException, NotFoundException, UnavailableException
from .hashing import HashRing, ShardMap, unreachable_shards
from .interface import BackendInterface, SearchIndex
from .meter import record_work
from .models import (
    ClusterConfig,
    ClusterState,
    ConsistencyMode,
    LoadReport,
    NodeStatus,
    RebalanceReport,
    SearchFilters,
    ShardInfo,
    VersionedValue,
    WriteAck,
)

_LOCK_STRIPES = 64
_RECORD_OVERHEAD_BYTES = 600


class CommitRecord(NamedTuple):
    """One entry of a key's commit log; ``value`` is None for a tombstone."""

    sequence: int
    version: int
    value: Optional[Article]
    committed_at: float
    size: int
    fresh: bool  # first commit of an incarnation, visible everywhere at once


def payload_size(article: Article) -> int:
    return len(article.title.encode("utf-8")) + len(article.body.encode("utf-8")) + _RECORD_OVERHEAD_BYTES


def node_name(index: int) -> str:
    return f"node-{index:02d}"


class SimulatedCluster(BackendInterface, LoggingMixin):
    """N-node in-memory cluster with replication, consistency modes and fault injection."""

    def __init__(self, config: Optional[ClusterConfig] = None, clock: Optional[Callable[[], float]] = None):
        self.config = config or ClusterConfig()
        self.clock: Callable[[], float] = clock or time.monotonic
        self._ring = HashRing((node_name(i) for i in range(self.config.nodes)), self.config.virtual_nodes)
        self._shard_map: ShardMap = self._ring.shard_map(self.config.replication_factor)
        self._live: FrozenSet[str] = frozenset(self._ring.nodes)

        self._records: Dict[str, List[CommitRecord]] = {}
        self._tokens: Dict[str, int] = {}
        self._catalog: Dict[str, Dict[str, ReferenceEntity]] = {}
        self._payloads: Dict[str, bytes] = {}
        self._metadata: Optional[SearchIndex] = None

        self._stripes = [threading.Lock() for _ in range(_LOCK_STRIPES)]
        self._admin_lock = threading.RLock()
        self._rng_lock = threading.Lock()
        self._rng = np.random.default_rng([self.config.seed, 7])
        self._revision_counter = itertools.count(1)
        self._revision = 0
        self._scan_cache: Optional[Tuple[int, Tuple[Article, ...], FrozenSet[int], int]] = None

    # -- helpers --------------------------------------------------------------------

    @property
    def staleness_window(self) -> float:
        return self.config.staleness_window

    @property
    def shard_map(self) -> ShardMap:
        return self._shard_map

    @property
    def live_nodes(self) -> FrozenSet[str]:
        return self._live

    @property
    def revision(self) -> int:
        """Counter bumped by every mutation and topology change."""
        return self._revision

    def _bump(self) -> None:
        self._revision = next(self._revision_counter)

    def _lock_for(self, key: str) -> threading.Lock:
        return self._stripes[self._token(key) % _LOCK_STRIPES]

    def _token(self, key: str) -> int:
        token = self._tokens.get(key)
        if token is None:
            token = int(hashlib.sha1(key.encode("utf-8")).hexdigest(), 16)
            self._tokens[key] = token
        return token

    def _shard(self, key: str) -> int:
        return self._shard_map.shard_of_token(self._token(key))

    def _live_replicas(self, key: str) -> List[str]:
        live = self._live
        return [node for node in self._shard_map.replicas[self._shard(key)] if node in live]

    def _require_live_replica(self, key: str) -> List[str]:
        replicas = self._live_replicas(key)
        if not replicas:
            raise UnavailableException(key=key, shard=self._shard(key))
        return replicas

    def _latest(self, article_id: str) -> Optional[CommitRecord]:
        log = self._records.get(article_id)
        return log[-1] if log else None

    def _apply_lag(self, key: str, record: CommitRecord, replica: str) -> float:
        window = self.staleness_window
        if window <= 0.0 or record.fresh:
            return 0.0
        digest = hashlib.sha1(f"{self.config.seed}:{key}:{record.sequence}:{replica}".encode("utf-8")).digest()
        return window * int.from_bytes(digest[:4], "big") / 2 ** 32

    def _append(self, article_id: str, version: int, value: Optional[Article], fresh: bool) -> CommitRecord:
        log = self._records.setdefault(article_id, [])
        sequence = log[-1].sequence + 1 if log else 1
        size = payload_size(value) if value is not None else 0
        record = CommitRecord(sequence, version, value, self.clock(), size, fresh)
        log.append(record)
        self._bump()
        return record

    @staticmethod
    def _ack(article_id: str, record: CommitRecord) -> WriteAck:
        return WriteAck(
            article_id=article_id, version=record.version, sequence=record.sequence, committed_at=record.committed_at
        )

    @staticmethod
    def _served(article_id: str, record: CommitRecord) -> VersionedValue:
        return VersionedValue(
            article_id=article_id,
            version=record.version,
            payload=record.value,
            write_timestamp=record.committed_at,
            sequence=record.sequence,
        )

    # -- articles -------------------------------------------------------------------

    def write(self, article: Article) -> WriteAck:
        with self._lock_for(article.id):
            latest = self._latest(article.id)
            if latest is not None and latest.value is not None:
                raise ConflictException(article.id)
            self._require_live_replica(article.id)
            value = article if article.version == 1 else article.model_copy(update={"version": 1})
            record = self._append(article.id, 1, value, fresh=True)
        record_work(articles=1, bytes=record.size)
        return self._ack(article.id, record)

    def update(self, article_id: str, new_body: str) -> WriteAck:
        with self._lock_for(article_id):
            latest = self._latest(article_id)
            if latest is None or latest.value is None:
                raise NotFoundException(article_id)
            self._require_live_replica(article_id)
            value = latest.value.with_update(new_body)
            record = self._append(article_id, value.version, value, fresh=False)
        record_work(articles=1, bytes=record.size)
        return self._ack(article_id, record)

    def delete(self, article_id: str) -> WriteAck:
        with self._lock_for(article_id):
            latest = self._latest(article_id)
            if latest is None or latest.value is None:
                raise NotFoundException(article_id)
            self._require_live_replica(article_id)
            record = self._append(article_id, latest.version, None, fresh=False)
        record_work(articles=1)
        return self._ack(article_id, record)

    def read(self, article_id: str, version: Optional[int] = None) -> VersionedValue:
        log = self._records.get(article_id)
        if not log:
            raise NotFoundException(article_id)
        replicas = self._require_live_replica(article_id)
        snapshot = list(log)

        if version is not None:
            for record in reversed(snapshot):
                if record.value is None:
                    break
                if record.version == version:
                    record_work(articles=1, bytes=record.size)
                    return self._served(article_id, record)
                if record.fresh:
                    break
            raise NotFoundException(f"{article_id}@v{version}")

        record = snapshot[-1]
        if self.config.consistency is ConsistencyMode.EVENTUAL and self.staleness_window > 0.0:
            with self._rng_lock:
                replica = replicas[int(self._rng.integers(len(replicas)))]
            now = self.clock()
            for candidate in reversed(snapshot):
                if candidate.committed_at + self._apply_lag(article_id, candidate, replica) <= now:
                    record = candidate
                    break
        if record.value is None:
            raise NotFoundException(article_id)
        record_work(articles=1, bytes=record.size)
        return self._served(article_id, record)

    def version_history(self, article_id: str) -> List[int]:
        log = self._records.get(article_id)
        if not log or log[-1].value is None:
            raise NotFoundException(article_id)
        versions: List[int] = []
        for record in reversed(log):
            if record.value is None:
                break
            versions.append(record.version)
            if record.fresh:
                break
        return list(reversed(versions))

    def article_count(self) -> int:
        return sum(1 for log in list(self._records.values()) if log and log[-1].value is not None)

    def article_ids(self) -> List[str]:
        """Ids of live articles, sorted; no reachability check."""
        return sorted(key for key, log in list(self._records.items()) if log and log[-1].value is not None)

    def data_shards(self) -> Set[int]:
        return {self._shard(key) for key in self.article_ids()}

    def scan_articles(self) -> Iterator[Article]:
        cached = self._scan_cache
        if cached is not None and cached[0] == self._revision:
            _, articles, shards, total = cached
        else:
            revision = self._revision
            live = sorted(
                (key, log[-1]) for key, log in list(self._records.items()) if log and log[-1].value is not None
            )
            articles = tuple(record.value for _, record in live)
            shards = frozenset(self._shard(key) for key, _ in live)
            total = sum(record.size for _, record in live)
            self._scan_cache = (revision, articles, shards, total)
        dead = unreachable_shards(self._shard_map, set(self._ring.nodes) - self._live, shards)
        if dead:
            raise UnavailableException(shard=dead[0])
        record_work(articles=len(articles), bytes=total)
        return iter(articles)

    def search(self, terms: Sequence[str], filters: Optional[SearchFilters] = None) -> List[str]:
        if self._metadata is None:
            raise IndexNotBuiltException()
        filters = filters or SearchFilters()
        terms = [t.lower() for t in terms if t]

        if not terms:
            ranked = [(0.0, a.id) for a in self.scan_articles() if filters.accepts(a)]
            return [article_id for _, article_id in ranked]

        best: Dict[str, float] = {}
        for document_id, score in self._metadata.matching_documents(terms).items():
            article_id = self._metadata.article_of(document_id)
            if score > best.get(article_id, float("-inf")):
                best[article_id] = score

        results = []
        for article_id, score in best.items():
            latest = self._latest(article_id)
            if latest is None or latest.value is None:
                continue  # tombstoned since indexing
            self._require_live_replica(article_id)
            if filters.accepts(latest.value):
                results.append((-score, article_id))
        results.sort()
        record_work(articles=len(best))
        return [article_id for _, article_id in results]

    # -- reference entities ---------------------------------------------------------

    def _require_any_live(self) -> None:
        if not self._live:
            raise UnavailableException(key="catalog")

    def _known_ids(self) -> Dict[str, Set[str]]:
        known = {kind: set(entities) for kind, entities in self._catalog.items()}
        known["article"] = set(self._records)
        return known

    def put_entity(self, entity: ReferenceEntity) -> None:
        kind = entity_kind(entity)
        with self._admin_lock:
            self._require_any_live()
            if entity.id in self._catalog.get(kind, {}):
                raise ConflictException(entity.id, what=kind)
            dangling = find_dangling_references([entity], self._known_ids())
            if dangling:
                raise DanglingReferenceException(*dangling[0])
            self._catalog.setdefault(kind, {})[entity.id] = entity
            self._bump()
        record_work(articles=0, bytes=_RECORD_OVERHEAD_BYTES)

    def update_entity(self, entity: ReferenceEntity) -> None:
        kind = entity_kind(entity)
        with self._admin_lock:
            self._require_any_live()
            if entity.id not in self._catalog.get(kind, {}):
                raise NotFoundException(entity.id, what=kind)
            self._catalog[kind][entity.id] = entity
            self._bump()
        record_work(articles=0, bytes=_RECORD_OVERHEAD_BYTES)

    def get_entity(self, kind: str, entity_id: str) -> ReferenceEntity:
        self._require_any_live()
        try:
            return self._catalog[kind][entity_id]
        except KeyError:
            raise NotFoundException(entity_id, what=kind) from None

    def list_entities(self, kind: str) -> List[ReferenceEntity]:
        entities = self._catalog.get(kind, {})
        return [entities[key] for key in sorted(entities)]

    def media_payload(self, media_id: str) -> bytes:
        self._require_any_live()
        try:
            return self._payloads[media_id]
        except KeyError:
            raise NotFoundException(media_id, what="media") from None

    # -- bulk load ------------------------------------------------------------------

    def bulk_load(self, data) -> LoadReport:
        started = time.perf_counter()
        if data.is_empty:
            return LoadReport(bytes=0, articles=0, entities=0, elapsed_seconds=0.0)
        entities: List[Entity] = list(data.entities())

        with self._admin_lock:
            for entity in entities:
                kind = entity_kind(entity)
                if kind == "article":
                    latest = self._latest(entity.id)
                    if latest is not None and latest.value is not None:
                        raise ConflictException(entity.id)
                elif entity.id in self._catalog.get(kind, {}):
                    raise ConflictException(entity.id, what=kind)
            dangling = find_dangling_references(entities, self._known_ids())
            if dangling:
                self.logger.warning("Bulk load aborted: %d dangling references", len(dangling))
                raise DanglingReferenceException(*dangling[0])
            articles = [e for e in entities if isinstance(e, Article)]
            for article in articles:
                self._require_live_replica(article.id)

            for entity in entities:
                if isinstance(entity, Article):
                    continue
                self._catalog.setdefault(entity_kind(entity), {})[entity.id] = entity
                if isinstance(entity, MediaRef):
                    self._payloads[entity.id] = data.payload(entity.id)
            for article in articles:
                with self._lock_for(article.id):
                    value = article if article.version == 1 else article.model_copy(update={"version": 1})
                    self._append(article.id, 1, value, fresh=True)

        record_work(articles=len(articles), bytes=data.byte_size)
        elapsed = time.perf_counter() - started
        self.logger.info("Bulk loaded %d articles (%d entities, %d bytes)", len(articles), len(entities), data.byte_size)
        return LoadReport(bytes=data.byte_size, articles=len(articles), entities=len(entities), elapsed_seconds=elapsed)

    # -- metadata -------------------------------------------------------------------

    def install_metadata(self, index: SearchIndex) -> None:
        self._metadata = index
        self._bump()

    @property
    def metadata(self) -> Optional[SearchIndex]:
        return self._metadata

    # -- administration -------------------------------------------------------------

    def _require_node(self, node_id: str) -> None:
        if node_id not in self._ring.nodes:
            raise NotFoundException(node_id, what="node")

    def kill_node(self, node_id: str) -> ClusterState:
        with self._admin_lock:
            self._require_node(node_id)
            self._live = self._live - {node_id}
            self._bump()
        self.logger.info("Killed %s (%d live)", node_id, len(self._live))
        return self.status()

    def recover_node(self, node_id: str) -> ClusterState:
        with self._admin_lock:
            self._require_node(node_id)
            self._live = self._live | {node_id}
            self._bump()
        self.logger.info("Recovered %s (%d live)", node_id, len(self._live))
        return self.status()

    def add_node(self, node_id: str) -> ClusterState:
        with self._admin_lock:
            if node_id in self._ring.nodes:
                raise ConflictException(node_id, what="node")
            self._ring.add_node(node_id)
            self._live = self._live | {node_id}
            self._bump()
        self.logger.info("Added %s; placement changes on rebalance", node_id)
        return self.status()

    def rebalance(self) -> RebalanceReport:
        with self._admin_lock:
            new_map = self._ring.shard_map(self.config.replication_factor)
            old_map = self._shard_map
            moved_bytes = total_bytes = moved_keys = moved_primaries = 0
            keys = self.article_ids()
            for key in keys:
                size = self._records[key][-1].size
                token = self._token(key)
                old = old_map.replicas[old_map.shard_of_token(token)]
                new = new_map.replicas[new_map.shard_of_token(token)]
                gained = set(new) - set(old)
                total_bytes += size * len(new)
                moved_bytes += size * len(gained)
                moved_keys += 1 if gained else 0
                moved_primaries += 1 if old[0] != new[0] else 0
            self._shard_map = new_map
            self._bump()
        report = RebalanceReport(
            moved_bytes=moved_bytes,
            total_replica_bytes=total_bytes,
            moved_primary_fraction=moved_primaries / len(keys) if keys else 0.0,
            moved_keys=moved_keys,
        )
        self.logger.info("Rebalanced: %.3f of replica bytes moved", report.moved_fraction)
        return report

    def live_node_count(self) -> int:
        return len(self._live)

    def status(self) -> ClusterState:
        shard_map = self._shard_map
        live = self._live
        catalog_bytes = sum(len(entities) for entities in self._catalog.values()) * _RECORD_OVERHEAD_BYTES
        catalog_bytes += sum(len(p) for p in self._payloads.values())
        stored = {node: catalog_bytes for node in self._ring.nodes}
        data_shards: Set[int] = set()
        for key in self.article_ids():
            shard = shard_map.shard_of_token(self._token(key))
            data_shards.add(shard)
            size = sum(r.size for r in self._records[key])
            for node in shard_map.replicas[shard]:
                stored[node] += size
        return ClusterState(
            nodes=[NodeStatus(node_id=n, live=n in live, stored_bytes=stored[n]) for n in self._ring.nodes],
            replication_factor=self.config.replication_factor,
            consistency=self.config.consistency,
            staleness_window_ms=self.config.staleness_window_ms if self.staleness_window else 0.0,
            shards=[
                ShardInfo(shard_id=i, end_token=token, replicas=shard_map.replicas[i])
                for i, token in enumerate(shard_map.tokens)
            ],
            data_shards=len(data_shards),
            unreachable_shards=unreachable_shards(shard_map, set(self._ring.nodes) - live, data_shards),
        )

    # -- persistence ----------------------------------------------------------------

    def save(self, directory: Union[str, Path]) -> Path:
        from .persistence import save_cluster

        return save_cluster(self, Path(directory))

    @classmethod
    def open(cls, directory: Union[str, Path], clock: Optional[Callable[[], float]] = None) -> "SimulatedCluster":
        from .persistence import open_cluster

        return open_cluster(Path(directory), clock=clock)
