"""Value types exchanged with storage backends."""

from datetime import date
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..corpus.models import Article


class ConsistencyMode(str, Enum):
    STRONG = "strong"
    EVENTUAL = "eventual"


class ClusterConfig(BaseModel):
    """Topology and consistency settings of the simulated cluster."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    nodes: int = Field(default=5, ge=1)
    replication_factor: int = Field(default=3, ge=1)
    virtual_nodes: int = Field(default=64, ge=1, description="Ring tokens per node")
    consistency: ConsistencyMode = ConsistencyMode.STRONG
    staleness_window_ms: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=42, ge=0)

    @model_validator(mode="after")
    def check_replication(self) -> "ClusterConfig":
        if self.replication_factor > self.nodes:
            raise ValueError(
                f"replication factor {self.replication_factor} exceeds cluster size {self.nodes}"
            )
        return self

    @property
    def staleness_window(self) -> float:
        """Window in seconds; zero under strong consistency."""
        if self.consistency is ConsistencyMode.STRONG:
            return 0.0
        return self.staleness_window_ms / 1000.0


class NodeStatus(BaseModel):
    node_id: str
    live: bool
    stored_bytes: int = 0


class ShardInfo(BaseModel):
    """One arc of the ring, ending (inclusive) at ``end_token``."""

    shard_id: int
    end_token: int
    replicas: Tuple[str, ...]


class ClusterState(BaseModel):
    """Snapshot of nodes, placement and consistency."""

    nodes: List[NodeStatus]
    replication_factor: int
    consistency: ConsistencyMode
    staleness_window_ms: float
    shards: List[ShardInfo]
    data_shards: int = Field(..., description="Shards holding at least one article")
    unreachable_shards: List[int] = Field(default_factory=list)

    @property
    def live_nodes(self) -> List[str]:
        return [n.node_id for n in self.nodes if n.live]


class VersionedValue(BaseModel):
    """One committed version of an article as served by a read."""

    model_config = ConfigDict(frozen=True)

    article_id: str
    version: int = Field(..., ge=1)
    payload: Article
    write_timestamp: float
    sequence: int = Field(..., ge=1, description="Per-key commit counter that survives delete/re-write")


class WriteAck(BaseModel):
    model_config = ConfigDict(frozen=True)

    article_id: str
    version: int
    sequence: int
    committed_at: float


class LoadReport(BaseModel):
    bytes: int
    articles: int
    entities: int
    elapsed_seconds: float


class RebalanceReport(BaseModel):
    moved_bytes: int = Field(..., description="Replica bytes newly placed on a node")
    total_replica_bytes: int
    moved_primary_fraction: float
    moved_keys: int

    @property
    def moved_fraction(self) -> float:
        if self.total_replica_bytes == 0:
            return 0.0
        return self.moved_bytes / self.total_replica_bytes


class SearchFilters(BaseModel):
    """Conjunctive filters for :meth:`BackendInterface.search`."""

    model_config = ConfigDict(frozen=True)

    author_id: Optional[str] = None
    country_id: Optional[str] = None
    topic_id: Optional[str] = None
    date_from: Optional[date] = None
    date_to: Optional[date] = None

    def accepts(self, article: Article) -> bool:
        if self.author_id is not None and article.author_id != self.author_id:
            return False
        if self.country_id is not None and article.country_id != self.country_id:
            return False
        if self.topic_id is not None and self.topic_id not in article.topic_ids:
            return False
        if self.date_from is not None and article.publish_date < self.date_from:
            return False
        if self.date_to is not None and article.publish_date > self.date_to:
            return False
        return True
