"""Batch and incremental metadata extraction.

The pipeline reads the live articles and their media transcripts from a
backend, tokenizes them, builds the TF-IDF index, ranks articles by weighted
PageRank over citations and fits an LDA topic model. The resulting
:class:`MetadataStore` is what a backend serves ``search`` from.
"""

import hashlib
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field

from ..backend.interface import BackendInterface
from ..backend.meter import record_work
from ..corpus.exceptions import CodecException
from ..corpus.models import Article, DocumentKind, MediaRef, MetadataRecord
from ..corpus.xml_codec import read_entity_file, serialize_entity, write_entity_file
from ..logging_config import LoggingMixin, get_logger, log_performance
from .exceptions import MetadataWriteException, PipelineStateException
from .pagerank import DEFAULT_DAMPING, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, CitationGraph, compute_pagerank
from .tfidf import InvertedIndex, build_tfidf
from .tokenizer import Document, collect_documents, term_frequencies, tokenize_documents
from .topics import (
    DEFAULT_BETA,
    DEFAULT_ITERATIONS,
    DEFAULT_MAX_TOKENS_PER_DOCUMENT,
    DEFAULT_TOPIC_COUNT,
    GibbsSampler,
    TopicModelState,
    extract_topics,
)

logger = get_logger(__name__)


class PipelineConfig(BaseModel):
    """Tunables of the metadata pipeline."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    damping: float = Field(default=DEFAULT_DAMPING, gt=0.0, lt=1.0)
    tolerance: float = Field(default=DEFAULT_TOLERANCE, gt=0.0)
    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)
    extract_topics: bool = True
    topic_count: int = Field(default=DEFAULT_TOPIC_COUNT, ge=2)
    alpha: Optional[float] = Field(default=None, gt=0.0, description="Defaults to 50 / topic_count")
    beta: float = Field(default=DEFAULT_BETA, gt=0.0)
    gibbs_iterations: int = Field(default=DEFAULT_ITERATIONS, ge=1)
    max_tokens_per_document: Optional[int] = Field(
        default=DEFAULT_MAX_TOKENS_PER_DOCUMENT,
        ge=1,
        description="Leading tokens per document the topic model sees; None keeps all",
    )
    gibbs_sampler: GibbsSampler = GibbsSampler.SEQUENTIAL
    seed: int = Field(default=42, ge=0)
    worker_threads: int = Field(default=1, ge=1)


class DocumentInfo(NamedTuple):
    article_id: str
    kind: DocumentKind
    version: int  # 0 when reloaded from disk


class MetadataStore:
    """Index, PageRank scores and topic distributions for every indexed document."""

    def __init__(
        self,
        index: InvertedIndex,
        documents: Dict[str, DocumentInfo],
        pagerank: Dict[str, float],
        topic_distributions: Dict[str, Dict[int, float]],
        topic_model: Optional[TopicModelState] = None,
        tokens: Optional[Dict[str, List[str]]] = None,
    ):
        self.index = index
        self.documents = documents
        self.pagerank = pagerank
        self.topic_distributions = topic_distributions
        self.topic_model = topic_model
        self._tokens: Dict[str, List[str]] = tokens or {}

    @classmethod
    def empty(cls) -> "MetadataStore":
        return cls(InvertedIndex(), {}, {}, {})

    @property
    def document_count(self) -> int:
        return self.index.document_count

    @property
    def article_ids(self) -> List[str]:
        return sorted({info.article_id for info in self.documents.values()})

    # SearchIndex protocol

    def matching_documents(self, terms: Sequence[str]) -> Dict[str, float]:
        return self.index.matching_documents(terms)

    def article_of(self, document_id: str) -> str:
        return self.documents[document_id].article_id

    def record(self, document_id: str) -> MetadataRecord:
        info = self.documents[document_id]
        return MetadataRecord(
            document_id=document_id,
            article_id=info.article_id,
            kind=info.kind,
            term_frequencies=self.index.term_frequencies.get(document_id, {}),
            tfidf_vector=self.index.tfidf_vector(document_id),
            pagerank_score=self.pagerank[info.article_id],
            topic_distribution=self.topic_distributions.get(document_id, {}),
        )

    def records(self) -> List[MetadataRecord]:
        return [self.record(document_id) for document_id in sorted(self.documents)]

    def digest(self) -> str:
        """SHA-256 over the canonical XML of every record in document-id order."""
        hasher = hashlib.sha256()
        for record in self.records():
            hasher.update(serialize_entity(record))
        return hasher.hexdigest()

    def __repr__(self) -> str:
        return f"MetadataStore(documents={self.document_count}, articles={len(self.pagerank)})"


class MetadataPipeline(LoggingMixin):
    """Builds and refreshes :class:`MetadataStore` instances."""

    def __init__(self, config: Optional[PipelineConfig] = None):
        self.config = config or PipelineConfig()

    def build(self, backend: BackendInterface) -> MetadataStore:
        """Full extraction over everything currently live in ``backend``."""
        articles = list(backend.scan_articles())
        media = [m for m in backend.list_entities("media") if isinstance(m, MediaRef)]
        return self.build_from(articles, media)

    def build_from(
        self, articles: Iterable[Article], media: Iterable[MediaRef], previous: Optional[MetadataStore] = None
    ) -> MetadataStore:
        articles = list(articles)
        documents = collect_documents(articles, media)
        with log_performance("metadata_pipeline", self.logger):
            tokens = self._tokenize(documents, previous)
            index = build_tfidf({doc_id: term_frequencies(toks) for doc_id, toks in tokens.items()})
            pagerank = compute_pagerank(
                CitationGraph.from_articles(articles),
                damping=self.config.damping,
                tolerance=self.config.tolerance,
                max_iterations=self.config.max_iterations,
            )
            topic_model = None
            distributions: Dict[str, Dict[int, float]] = {}
            if self.config.extract_topics and documents:
                topic_model = extract_topics(
                    tokens,
                    topic_count=self.config.topic_count,
                    alpha=self.config.alpha,
                    beta=self.config.beta,
                    iterations=self.config.gibbs_iterations,
                    seed=self.config.seed,
                    max_tokens_per_document=self.config.max_tokens_per_document,
                    sampler=self.config.gibbs_sampler,
                )
                distributions = {doc_id: topic_model.distribution(doc_id) for doc_id in topic_model.document_ids}

        infos = {doc.document_id: DocumentInfo(doc.article_id, doc.kind, doc.version) for doc in documents}
        record_work(articles=len(documents), bytes=sum(len(doc.text) for doc in documents))
        self.logger.info(
            "Metadata built: %d documents, %d terms, %d articles ranked",
            len(infos), len(index.postings), len(pagerank),
        )
        return MetadataStore(index, infos, pagerank, distributions, topic_model, tokens)

    def incremental_update(self, backend: BackendInterface, store: MetadataStore, data) -> MetadataStore:
        """Refresh ``store`` after ``data`` (a slice) was bulk-loaded into ``backend``.

        Document frequencies, N, PageRank and topics are recomputed over the
        union; only tokenization of unchanged documents is reused.
        """
        if data.is_empty:
            return store
        articles = list(backend.scan_articles())
        live = {a.id for a in articles}
        missing = [article_id for article_id in data.article_ids if article_id not in live]
        if missing:
            raise PipelineStateException(
                f"slice not loaded: {len(missing)} articles missing from the backend (first: {missing[0]})",
                missing=missing[0],
            )
        media = [m for m in backend.list_entities("media") if isinstance(m, MediaRef)]
        return self.build_from(articles, media, previous=store)

    def _tokenize(self, documents: List[Document], previous: Optional[MetadataStore]) -> Dict[str, List[str]]:
        reused: Dict[str, List[str]] = {}
        pending: List[Document] = []
        for doc in documents:
            info = previous.documents.get(doc.document_id) if previous is not None else None
            cached = previous._tokens.get(doc.document_id) if previous is not None else None
            if info is not None and cached is not None and info.version == doc.version:
                reused[doc.document_id] = cached
            else:
                pending.append(doc)
        fresh = tokenize_documents(pending, workers=self.config.worker_threads)
        if previous is not None:
            self.logger.debug("Tokenized %d documents, reused %d", len(fresh), len(reused))
        merged = {**reused, **fresh}
        return {doc_id: merged[doc_id] for doc_id in sorted(merged)}


def install(backend: BackendInterface, store: MetadataStore) -> None:
    backend.install_metadata(store)


def persist_metadata(
    records: Union[MetadataStore, Iterable[MetadataRecord]], directory: Union[str, Path]
) -> List[Path]:
    """Write one ``<document-id>.xml`` per record; stale record files are removed."""
    if isinstance(records, MetadataStore):
        records = records.records()
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for stale in directory.glob("*.xml"):
            stale.unlink()
    except OSError as e:
        raise MetadataWriteException(str(directory), str(e)) from e

    paths = []
    for record in records:
        path = directory / f"{record.document_id}.xml"
        try:
            write_entity_file(path, record)
        except CodecException as e:
            raise MetadataWriteException(str(path), e.message) from e
        paths.append(path)
    logger.info("Persisted %d metadata records to %s", len(paths), directory)
    return paths


def load_metadata(directory: Union[str, Path]) -> MetadataStore:
    """Rebuild a store from a directory written by :func:`persist_metadata`."""
    directory = Path(directory)
    if not directory.is_dir():
        raise PipelineStateException(f"no metadata at {directory}: run the index step first", missing=str(directory))
    records = [read_entity_file(path) for path in sorted(directory.glob("*.xml"))]
    records = [r for r in records if isinstance(r, MetadataRecord)]

    index = build_tfidf({r.document_id: r.term_frequencies for r in records})
    documents = {r.document_id: DocumentInfo(r.article_id, r.kind, 0) for r in records}
    pagerank: Dict[str, float] = {}
    for record in records:
        if record.kind is DocumentKind.ARTICLE:
            pagerank[record.article_id] = record.pagerank_score
    for record in records:
        pagerank.setdefault(record.article_id, record.pagerank_score)
    distributions = {r.document_id: r.topic_distribution for r in records if r.topic_distribution}
    logger.info("Loaded %d metadata records from %s", len(records), directory)
    return MetadataStore(index, documents, pagerank, distributions)
