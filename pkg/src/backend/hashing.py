"""Consistent-hash ring with virtual nodes and replica placement.

Every node owns ``virtual_nodes`` tokens on a 160-bit SHA-1 ring. The arc
ending at a token is one shard; its replicas are the next R distinct nodes
met walking clockwise from that token.
"""

import bisect
import hashlib
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .exceptions import BackendConfigException


def ring_token(value: str) -> int:
    return int(hashlib.sha1(value.encode("utf-8")).hexdigest(), 16)


class HashRing:
    """Sorted token ring; adding a node only inserts that node's tokens."""

    def __init__(self, nodes: Iterable[str] = (), virtual_nodes: int = 64):
        self.virtual_nodes = virtual_nodes
        self._tokens: List[int] = []
        self._owners: Dict[int, str] = {}
        self.nodes: List[str] = []
        for node in nodes:
            self.add_node(node)

    def add_node(self, node: str) -> None:
        if node in self.nodes:
            raise BackendConfigException(f"node {node} already on the ring")
        self.nodes.append(node)
        for i in range(self.virtual_nodes):
            token = ring_token(f"{node}#{i}")
            if token in self._owners:
                continue
            self._owners[token] = node
            bisect.insort(self._tokens, token)

    def remove_node(self, node: str) -> None:
        self.nodes.remove(node)
        self._tokens = [t for t in self._tokens if self._owners[t] != node]
        self._owners = {t: n for t, n in self._owners.items() if n != node}

    def shard_map(self, replication_factor: int) -> "ShardMap":
        distinct = len(set(self._owners.values()))
        if replication_factor > distinct:
            raise BackendConfigException(
                f"replication factor {replication_factor} needs at least that many nodes, ring has {distinct}"
            )
        owners = [self._owners[t] for t in self._tokens]
        replicas = []
        count = len(owners)
        for i in range(count):
            chosen: List[str] = []
            j = i
            while len(chosen) < replication_factor:
                node = owners[j % count]
                if node not in chosen:
                    chosen.append(node)
                j += 1
            replicas.append(tuple(chosen))
        return ShardMap(tuple(self._tokens), tuple(replicas))


class ShardMap:
    """Immutable placement: shard ``i`` covers ``(tokens[i-1], tokens[i]]``, wrapping at the ring end."""

    def __init__(self, tokens: Tuple[int, ...], replicas: Tuple[Tuple[str, ...], ...]):
        self.tokens = tokens
        self.replicas = replicas

    def __len__(self) -> int:
        return len(self.tokens)

    def shard_of_token(self, token: int) -> int:
        index = bisect.bisect_left(self.tokens, token)
        return 0 if index == len(self.tokens) else index

    def shard_of(self, key: str) -> int:
        return self.shard_of_token(ring_token(key))

    def replicas_of(self, key: str) -> Tuple[str, ...]:
        return self.replicas[self.shard_of(key)]

    def primary_of(self, key: str) -> str:
        return self.replicas_of(key)[0]


def reachability_oracle(
    shard_map: ShardMap, killed: Iterable[str], data_shards: Optional[Iterable[int]] = None
) -> bool:
    """True when every data-bearing shard keeps at least one live replica."""
    dead: FrozenSet[str] = frozenset(killed)
    shards = range(len(shard_map)) if data_shards is None else data_shards
    return all(any(node not in dead for node in shard_map.replicas[s]) for s in shards)


def unreachable_shards(shard_map: ShardMap, killed: Iterable[str], data_shards: Iterable[int]) -> List[int]:
    dead = frozenset(killed)
    return sorted(s for s in data_shards if all(node in dead for node in shard_map.replicas[s]))


def survivable_removals(
    shard_map: ShardMap, order: Sequence[str], data_shards: Optional[Iterable[int]] = None
) -> int:
    """Largest k such that killing ``order[:k]`` leaves all data reachable."""
    shards: Set[int] = set(range(len(shard_map)) if data_shards is None else data_shards)
    for k in range(1, len(order) + 1):
        if not reachability_oracle(shard_map, order[:k], shards):
            return k - 1
    return len(order)
