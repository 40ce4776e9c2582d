"""Contract every storage backend under test implements.

An external adapter (a MapReduce-backed store, a real key-value cluster)
subclasses :class:`BackendInterface`; the scenarios and the query engine
only ever talk to this surface.
"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Protocol, Sequence

from ..corpus.models import Article, ReferenceEntity
from .models import ClusterState, LoadReport, RebalanceReport, SearchFilters, VersionedValue, WriteAck

if TYPE_CHECKING:
    from ..generator.slicing import Slice


class SearchIndex(Protocol):
    """What a backend needs from a metadata index to serve :meth:`BackendInterface.search`."""

    def matching_documents(self, terms: Sequence[str]) -> Dict[str, float]:
        """Documents containing any term, mapped to their summed TF-IDF weight."""

    def article_of(self, document_id: str) -> str:
        """Owning article of a document."""


class BackendInterface(ABC):
    """Read, write, update, delete and search plus bulk load and cluster administration."""

    # -- articles -------------------------------------------------------------------

    @abstractmethod
    def write(self, article: Article) -> WriteAck:
        """Store a new article at version 1."""

    @abstractmethod
    def update(self, article_id: str, new_body: str) -> WriteAck:
        """Commit the next version of an article with a new body."""

    @abstractmethod
    def read(self, article_id: str, version: Optional[int] = None) -> VersionedValue:
        """Latest version (per the consistency mode), or a specific one."""

    @abstractmethod
    def delete(self, article_id: str) -> WriteAck:
        """Tombstone an article."""

    @abstractmethod
    def search(self, terms: Sequence[str], filters: Optional[SearchFilters] = None) -> List[str]:
        """Article ids ranked by TF-IDF score, ties by ascending id."""

    @abstractmethod
    def scan_articles(self) -> Iterator[Article]:
        """Latest version of every live article, in id order."""

    @abstractmethod
    def version_history(self, article_id: str) -> List[int]:
        """Committed versions of the article's current incarnation."""

    @abstractmethod
    def article_count(self) -> int:
        """Number of live articles."""

    # -- reference entities ---------------------------------------------------------

    @abstractmethod
    def put_entity(self, entity: ReferenceEntity) -> None:
        """Add a journalist, topic, language or other reference entity."""

    @abstractmethod
    def update_entity(self, entity: ReferenceEntity) -> None:
        """Replace an existing reference entity."""

    @abstractmethod
    def get_entity(self, kind: str, entity_id: str) -> ReferenceEntity:
        """One reference entity by kind and id."""

    @abstractmethod
    def list_entities(self, kind: str) -> List[ReferenceEntity]:
        """Every reference entity of a kind, in id order."""

    @abstractmethod
    def media_payload(self, media_id: str) -> bytes:
        """Binary payload of a media file."""

    # -- bulk and administration ----------------------------------------------------

    @abstractmethod
    def bulk_load(self, data: "Slice") -> LoadReport:
        """Load a referentially closed slice, rejecting duplicates and dangling ids."""

    @abstractmethod
    def install_metadata(self, index: SearchIndex) -> None:
        """Attach the metadata index that serves search."""

    @property
    @abstractmethod
    def metadata(self) -> Optional[SearchIndex]:
        """Installed metadata index, if any."""

    @abstractmethod
    def kill_node(self, node_id: str) -> ClusterState:
        """Crash-stop a node; its data stays for recovery."""

    @abstractmethod
    def recover_node(self, node_id: str) -> ClusterState:
        """Bring a killed node back with its data."""

    @abstractmethod
    def add_node(self, node_id: str) -> ClusterState:
        """Join a fresh node; placement changes on :meth:`rebalance`."""

    @abstractmethod
    def rebalance(self) -> RebalanceReport:
        """Recompute placement from the current ring."""

    @abstractmethod
    def status(self) -> ClusterState:
        """Nodes, liveness, stored bytes and shard map."""

    def is_empty(self) -> bool:
        return self.article_count() == 0 and not self.list_entities("topic")

    def live_node_count(self) -> int:
        return len(self.status().live_nodes)
