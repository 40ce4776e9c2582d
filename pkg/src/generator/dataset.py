"""In-memory handle on a generated corpus."""

from typing import Dict, Iterator, List, NamedTuple, Sequence, Tuple

from ..corpus.models import Article, Author, Entity, MediaRef
from .models import CorpusManifest, GeneratorConfig


class CorpusUnit(NamedTuple):
    """One article with its media files and the authors it introduces."""

    index: int
    article: Article
    media: Tuple[Tuple[MediaRef, bytes], ...]
    authors: Tuple[Author, ...]
    byte_size: int

    def entities(self) -> List[Entity]:
        """Entities of the unit, authors first so the article's author precedes it."""
        return [*self.authors, self.article, *(media for media, _ in self.media)]


class GeneratedCorpus:
    """Manifest plus the entity stream it describes."""

    def __init__(self, manifest: CorpusManifest, shared: Sequence[Entity], units: Sequence[CorpusUnit]):
        self.manifest = manifest
        self.shared: Tuple[Entity, ...] = tuple(shared)
        self.units: Tuple[CorpusUnit, ...] = tuple(units)
        self._payloads: Dict[str, bytes] = {
            media.id: payload for unit in self.units for media, payload in unit.media
        }

    @property
    def config(self) -> GeneratorConfig:
        return self.manifest.config

    @property
    def article_count(self) -> int:
        return len(self.units)

    def payload(self, media_id: str) -> bytes:
        return self._payloads[media_id]

    def articles(self) -> Iterator[Article]:
        for unit in self.units:
            yield unit.article

    def authors(self) -> Iterator[Author]:
        for unit in self.units:
            yield from unit.authors

    def all_entities(self) -> Iterator[Entity]:
        yield from self.shared
        for unit in self.units:
            yield from unit.entities()

    def __repr__(self) -> str:
        return (
            f"GeneratedCorpus(seed={self.config.seed}, sf={self.config.scale_factor_gb}, "
            f"articles={self.article_count}, bytes={self.manifest.total_bytes})"
        )
