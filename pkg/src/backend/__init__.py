"""Storage backends: the adapter contract and the simulated reference cluster."""

from .cluster import SimulatedCluster
from .hashing import HashRing, ShardMap, reachability_oracle, survivable_removals
from .interface import BackendInterface, SearchIndex
from .meter import CostModel, WorkMeter, metered
from .models import (
    ClusterConfig,
    ClusterState,
    ConsistencyMode,
    LoadReport,
    RebalanceReport,
    SearchFilters,
    VersionedValue,
    WriteAck,
)

__all__ = [
    "BackendInterface",
    "ClusterConfig",
    "ClusterState",
    "ConsistencyMode",
    "CostModel",
    "HashRing",
    "LoadReport",
    "RebalanceReport",
    "SearchFilters",
    "SearchIndex",
    "ShardMap",
    "SimulatedCluster",
    "VersionedValue",
    "WorkMeter",
    "WriteAck",
    "metered",
    "reachability_oracle",
    "survivable_removals",
]
