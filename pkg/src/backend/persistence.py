"""On-disk layout of the reference backend.

A saved cluster directory holds::

    cluster.json                     topology, live set and clock origin
    store.db                         SQLite index of commit logs, catalog and payloads
    versions/<article-id>/<seq>.xml  one file per committed (non-tombstone) version
    catalog/<kind>/<id>.xml          reference entities
    payloads/<media-id>.bin          media bytes

The SQLite index is authoritative for commit order and tombstones; the XML
files carry the entity bodies.
"""

import json
import sqlite3
from pathlib import Path
from typing import Callable, Dict, List, Optional

from ..corpus.exceptions import CodecException
from ..corpus.models import Article
from ..corpus.xml_codec import read_entity_file, write_entity_file
from ..logging_config import get_logger, log_performance
from .cluster import CommitRecord, SimulatedCluster
from .exceptions import BackendConfigException
from .hashing import HashRing
from .models import ClusterConfig

logger = get_logger(__name__)

CLUSTER_FILE = "cluster.json"
STORE_FILE = "store.db"
LAYOUT_VERSION = 1


def _init_database(db_path: Path) -> None:
    with sqlite3.connect(db_path) as conn:
        conn.execute("""
            CREATE TABLE IF NOT EXISTS versions (
                article_id TEXT NOT NULL,
                sequence INTEGER NOT NULL,
                version INTEGER NOT NULL,
                committed_at REAL NOT NULL,
                deleted INTEGER NOT NULL,
                fresh INTEGER NOT NULL,
                size INTEGER NOT NULL,
                file_path TEXT,
                PRIMARY KEY (article_id, sequence)
            )
        """)
        conn.execute("""
            CREATE TABLE IF NOT EXISTS catalog (
                kind TEXT NOT NULL,
                entity_id TEXT NOT NULL,
                file_path TEXT NOT NULL,
                PRIMARY KEY (kind, entity_id)
            )
        """)
        conn.execute("""
            CREATE TABLE IF NOT EXISTS payloads (
                media_id TEXT PRIMARY KEY,
                file_path TEXT NOT NULL,
                byte_size INTEGER NOT NULL
            )
        """)
        conn.execute("DELETE FROM versions")
        conn.execute("DELETE FROM catalog")
        conn.execute("DELETE FROM payloads")
        conn.commit()


def _placed_nodes(cluster: SimulatedCluster) -> List[str]:
    """Nodes the current shard map was computed from (joins since the last rebalance excluded)."""
    owners = {replicas[0] for replicas in cluster.shard_map.replicas}
    return [node for node in cluster._ring.nodes if node in owners]


def save_cluster(cluster: SimulatedCluster, directory: Path) -> Path:
    """Write the cluster's full state under ``directory`` and return it."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise BackendConfigException(f"cannot create cluster directory {directory}: {e}") from e

    with log_performance("save_cluster", logger), cluster._admin_lock:
        db_path = directory / STORE_FILE
        _init_database(db_path)

        version_rows = []
        for article_id in sorted(cluster._records):
            for record in cluster._records[article_id]:
                rel_path = None
                if record.value is not None:
                    rel = Path("versions") / article_id / f"{record.sequence}.xml"
                    write_entity_file(directory / rel, record.value)
                    rel_path = rel.as_posix()
                version_rows.append((
                    article_id, record.sequence, record.version, record.committed_at,
                    int(record.value is None), int(record.fresh), record.size, rel_path,
                ))

        catalog_rows = []
        for kind in sorted(cluster._catalog):
            for entity_id, entity in sorted(cluster._catalog[kind].items()):
                rel = Path("catalog") / kind / f"{entity_id}.xml"
                write_entity_file(directory / rel, entity)
                catalog_rows.append((kind, entity_id, rel.as_posix()))

        payload_rows = []
        for media_id, payload in sorted(cluster._payloads.items()):
            rel = Path("payloads") / f"{media_id}.bin"
            path = directory / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(payload)
            payload_rows.append((media_id, rel.as_posix(), len(payload)))

        with sqlite3.connect(db_path) as conn:
            conn.executemany("INSERT INTO versions VALUES (?, ?, ?, ?, ?, ?, ?, ?)", version_rows)
            conn.executemany("INSERT INTO catalog VALUES (?, ?, ?)", catalog_rows)
            conn.executemany("INSERT INTO payloads VALUES (?, ?, ?)", payload_rows)
            conn.commit()

        state = {
            "layout_version": LAYOUT_VERSION,
            "config": cluster.config.model_dump(mode="json"),
            "ring_nodes": list(cluster._ring.nodes),
            "placed_nodes": _placed_nodes(cluster),
            "live_nodes": sorted(cluster.live_nodes),
        }
        (directory / CLUSTER_FILE).write_text(json.dumps(state, indent=2, sort_keys=True), encoding="utf-8")

    logger.info(
        "Cluster saved to %s: %d commits, %d catalog entities, %d payloads",
        directory, len(version_rows), len(catalog_rows), len(payload_rows),
    )
    return directory


def _read_state(directory: Path) -> Dict:
    path = directory / CLUSTER_FILE
    try:
        state = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BackendConfigException(f"{directory} is not a saved cluster (missing {CLUSTER_FILE})") from None
    except (OSError, json.JSONDecodeError) as e:
        raise BackendConfigException(f"cannot read {path}: {e}") from e
    if state.get("layout_version") != LAYOUT_VERSION:
        raise BackendConfigException(f"unsupported cluster layout version {state.get('layout_version')!r}")
    return state


def open_cluster(directory: Path, clock: Optional[Callable[[], float]] = None) -> SimulatedCluster:
    """Rebuild a :class:`SimulatedCluster` saved by :func:`save_cluster`."""
    directory = Path(directory)
    state = _read_state(directory)
    db_path = directory / STORE_FILE
    if not db_path.exists():
        raise BackendConfigException(f"{directory} is missing {STORE_FILE}")

    config = ClusterConfig.model_validate(state["config"])
    cluster = SimulatedCluster(config, clock=clock)

    with log_performance("open_cluster", logger):
        ring = HashRing(state["ring_nodes"], config.virtual_nodes)
        placed = HashRing(state["placed_nodes"], config.virtual_nodes)
        cluster._ring = ring
        cluster._shard_map = placed.shard_map(config.replication_factor)
        cluster._live = frozenset(state["live_nodes"])

        with sqlite3.connect(db_path) as conn:
            conn.row_factory = sqlite3.Row
            versions = conn.execute(
                "SELECT * FROM versions ORDER BY article_id, sequence"
            ).fetchall()
            catalog = conn.execute("SELECT * FROM catalog ORDER BY kind, entity_id").fetchall()
            payloads = conn.execute("SELECT * FROM payloads ORDER BY media_id").fetchall()

        for row in versions:
            value: Optional[Article] = None
            if not row["deleted"]:
                value = read_entity_file(directory / row["file_path"])
            cluster._records.setdefault(row["article_id"], []).append(CommitRecord(
                sequence=row["sequence"],
                version=row["version"],
                value=value,
                committed_at=row["committed_at"],
                size=row["size"],
                fresh=bool(row["fresh"]),
            ))
        for row in catalog:
            entity = read_entity_file(directory / row["file_path"])
            cluster._catalog.setdefault(row["kind"], {})[row["entity_id"]] = entity
        for row in payloads:
            path = directory / row["file_path"]
            try:
                data = path.read_bytes()
            except OSError as e:
                raise CodecException(f"cannot read payload {path}: {e}") from e
            if len(data) != row["byte_size"]:
                raise CodecException(f"payload {row['media_id']} has {len(data)} bytes, index says {row['byte_size']}")
            cluster._payloads[row["media_id"]] = data
        cluster._bump()

    logger.info("Cluster opened from %s: %d articles", directory, cluster.article_count())
    return cluster
