"""Execution of the generic query set against any backend.

Every query works on one snapshot of the live articles taken from
``backend.scan_articles()``; reference entities come from the backend
catalog. Rankings break ties by ascending article id.
"""

import datetime as dt
import itertools
import math
import threading
import time
from collections import Counter, defaultdict
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from ..backend.exceptions import IndexNotBuiltException, NotFoundException
from ..backend.interface import BackendInterface
from ..backend.meter import metered, record_work
from ..backend.models import SearchFilters
from ..corpus.models import Article, Author, Journalist, Professional
from ..corpus.xml_codec import add_years
from ..logging_config import LoggingMixin
from ..metadata.tokenizer import tokenize
from .analytics import run_analytic
from .exceptions import QueryArgumentException
from .models import DEFAULT_LIMIT, QueryResult, QuerySpec

Bigram = Tuple[str, str]
WORDS_PER_COUNTRY = 10

CurrentDate = Union[dt.date, Callable[[], dt.date], None]


def _top(rows: List[dict], limit: Optional[int]) -> List[dict]:
    return rows if limit is None else rows[:limit]


def keyword_ranking(articles: Iterable[Article]) -> List[Tuple[str, int]]:
    counts = Counter(k for article in articles for k in article.keyword_ids)
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


class Snapshot:
    """Articles and catalog lookups for one query execution."""

    def __init__(self, backend: BackendInterface, articles: Sequence[Article]):
        self.backend = backend
        self.articles = list(articles)
        self.by_id: Dict[str, Article] = {a.id: a for a in self.articles}
        self._authors: Optional[Dict[str, Author]] = None

    @property
    def authors(self) -> Dict[str, Author]:
        if self._authors is None:
            self._authors = {a.id: a for a in self.backend.list_entities("author")}
        return self._authors

    def label(self, kind: str, entity_id: str, attribute: str) -> str:
        try:
            return getattr(self.backend.get_entity(kind, entity_id), attribute)
        except NotFoundException:
            return entity_id

    def between(self, start: dt.date, end: dt.date) -> List[Article]:
        return [a for a in self.articles if start <= a.publish_date <= end]


class QueryEngine(LoggingMixin):
    """Runs Q1-Q14, full-text search and the A1-A4 analytics.

    Token lists are cached per (article id, version) across executions.
    """

    def __init__(self, backend: BackendInterface, current_date: CurrentDate = None):
        self.backend = backend
        self._current_date = current_date
        self._tokens: Dict[Tuple[str, int], List[str]] = {}
        self._results: Dict[tuple, Tuple[List[dict], int, Tuple[int, int]]] = {}
        self._lock = threading.Lock()

    # -- plumbing -------------------------------------------------------------------

    def current_date(self, snapshot: Optional[Snapshot] = None) -> dt.date:
        """Virtual "today"; without a configured date, the latest publish date in the store."""
        if callable(self._current_date):
            return self._current_date()
        if self._current_date is not None:
            return self._current_date
        articles = snapshot.articles if snapshot is not None else list(self.backend.scan_articles())
        return max((a.publish_date for a in articles), default=dt.date.today())

    def tokens_of(self, article: Article) -> List[str]:
        key = (article.id, article.version)
        tokens = self._tokens.get(key)
        if tokens is None:
            tokens = tokenize(f"{article.title}\n{article.body}")
            self._tokens[key] = tokens
        return tokens

    def _require_index(self):
        metadata = self.backend.metadata
        if metadata is None:
            raise IndexNotBuiltException()
        return metadata

    def _cache_key(self, spec: QuerySpec) -> Optional[tuple]:
        revision = getattr(self.backend, "revision", None)
        if revision is None:
            return None
        today = self._current_date() if callable(self._current_date) else self._current_date
        return spec.model_dump_json(), revision, today

    def execute(self, spec: QuerySpec) -> QueryResult:
        """Run one query.

        At an unchanged backend revision the cached rows are served and the
        original scan work is reported to the active meter again.
        """
        spec.check()
        started = time.perf_counter()
        key = self._cache_key(spec)
        with self._lock:
            cached = self._results.get(key) if key is not None else None
        if cached is not None:
            rows, total, work = cached
            record_work(articles=work[0], bytes=work[1])
        else:
            with metered() as meter:
                snapshot = Snapshot(self.backend, self.backend.scan_articles())
                if spec.kind.is_analytic:
                    rows, total = run_analytic(spec, snapshot, self.current_date(snapshot), self.backend)
                else:
                    handler = getattr(self, f"_{spec.kind.value.lower()}")
                    rows, total = handler(spec, snapshot)
            record_work(articles=meter.articles, bytes=meter.bytes)
            if key is not None:
                with self._lock:
                    if any(k[1] != key[1] for k in self._results):
                        self._results.clear()
                    self._results[key] = (rows, total, (meter.articles, meter.bytes))
        elapsed = time.perf_counter() - started
        self.logger.debug("%s returned %d of %d rows in %.4fs", spec.kind.value, len(rows), total, elapsed)
        return QueryResult(kind=spec.kind, rows=rows, total_matched=total, execution_time=elapsed)

    # -- hottest topics ---------------------------------------------------------------

    def top_bigrams(self, articles: Iterable[Article], count: int) -> List[Tuple[Bigram, int]]:
        counts: Counter = Counter()
        for article in articles:
            tokens = self.tokens_of(article)
            counts.update(zip(tokens, tokens[1:]))
        return sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:count]

    def _q1(self, spec: QuerySpec, snap: Snapshot):
        metadata = self._require_index()
        pagerank: Dict[str, float] = getattr(metadata, "pagerank", {})
        top = [bigram for bigram, _ in self.top_bigrams(snap.articles, spec.limit or DEFAULT_LIMIT)]
        wanted = set(top)
        rows = []
        for article in snap.articles:
            tokens = self.tokens_of(article)
            present = wanted.intersection(zip(tokens, tokens[1:]))
            if present:
                rows.append({
                    "article_id": article.id,
                    "title": article.title,
                    "pagerank": pagerank.get(article.id, 0.0),
                    "bigrams": [" ".join(b) for b in top if b in present],
                })
        rows.sort(key=lambda r: (-r["pagerank"], r["article_id"]))
        return _top(rows, spec.limit), len(rows)

    def _q2(self, spec: QuerySpec, snap: Snapshot):
        labels: Dict[str, str] = {}
        rows = []
        for article in snap.between(spec.date_from, spec.date_to):
            for topic_id in article.topic_ids:
                if topic_id not in labels:
                    labels[topic_id] = snap.label("topic", topic_id, "label")
                rows.append({
                    "article_id": article.id,
                    "title": article.title,
                    "topic_id": topic_id,
                    "topic": labels[topic_id],
                })
        rows.sort(key=lambda r: (r["topic"], r["title"], r["article_id"]))
        return _top(rows, spec.limit), len(rows)

    def _q3(self, spec: QuerySpec, snap: Snapshot):
        author = self.backend.get_entity("author", spec.journalist_id)
        if not isinstance(author, Journalist):
            raise QueryArgumentException(spec.kind.value, f"{spec.journalist_id} is not a journalist", "journalist_id")
        words_by_country: Dict[str, Counter] = defaultdict(Counter)
        for article in snap.between(spec.date_from, spec.date_to):
            if article.author_id == spec.journalist_id:
                words_by_country[article.country_id].update(self.tokens_of(article))
        rows = []
        for country_id in sorted(words_by_country):
            ranked = sorted(words_by_country[country_id].items(), key=lambda item: (-item[1], item[0]))
            rows.append({
                "country_id": country_id,
                "country": snap.label("country", country_id, "name"),
                "keywords": [word for word, _ in ranked[:WORDS_PER_COUNTRY]],
            })
        return _top(rows, spec.limit), len(rows)

    def _keyword_rows(self, snap: Snapshot, articles: List[Article], limit: Optional[int]):
        ranking = keyword_ranking(articles)
        rows = [
            {"rank": rank, "keyword_id": keyword_id, "word": snap.label("keyword", keyword_id, "word"), "count": count}
            for rank, (keyword_id, count) in enumerate(_top(ranking, limit), start=1)
        ]
        return rows, len(ranking)

    def _q4(self, spec: QuerySpec, snap: Snapshot):
        return self._keyword_rows(snap, snap.between(spec.on_date, spec.on_date), spec.limit)

    def _q5(self, spec: QuerySpec, snap: Snapshot):
        chosen = [a for a in snap.articles if a.publish_date.year == spec.year and a.publish_date.month == spec.month]
        return self._keyword_rows(snap, chosen, spec.limit)

    # -- topics over time -------------------------------------------------------------

    def _q6(self, spec: QuerySpec, snap: Snapshot):
        years = {spec.year1, spec.year2}
        chosen = [
            a for a in snap.articles
            if a.publish_date.year in years and a.publish_date.timetuple().tm_yday == spec.day_of_year
        ]
        return self._keyword_rows(snap, chosen, spec.limit)

    def _q7(self, spec: QuerySpec, snap: Snapshot):
        previous_year = spec.on_date.year - 1
        rows = []
        for article in snap.between(spec.on_date, spec.on_date):
            references = sum(
                1 for cited in article.citations
                if cited in snap.by_id and snap.by_id[cited].publish_date.year == previous_year
            )
            rows.append({"article_id": article.id, "title": article.title, "references": references})
        rows.sort(key=lambda r: (-r["references"], r["article_id"]))
        return _top(rows, spec.limit), len(rows)

    def _q8(self, spec: QuerySpec, snap: Snapshot):
        end = self.current_date(snap)
        start = end - dt.timedelta(days=spec.interval_days - 1)
        received: Counter = Counter()
        for citing in snap.between(start, end):
            received.update(citing.citations)
        rows = []
        for article_id, count in received.items():
            article = snap.by_id.get(article_id)
            if article is not None and spec.topic_id in article.topic_ids:
                rows.append({"article_id": article_id, "title": article.title, "citations": count})
        rows.sort(key=lambda r: (-r["citations"], r["article_id"]))
        return _top(rows, spec.limit), len(rows)

    def _q9(self, spec: QuerySpec, snap: Snapshot):
        # (topic, year, month) -> author -> first publish day in that month
        firsts: Dict[Tuple[str, int, int], Dict[str, dt.date]] = defaultdict(dict)
        authors = snap.authors
        for article in snap.articles:
            if not isinstance(authors.get(article.author_id), (Journalist, Professional)):
                continue
            day = article.publish_date
            for topic_id in article.topic_ids:
                seen = firsts[(topic_id, day.year, day.month)]
                if article.author_id not in seen or day < seen[article.author_id]:
                    seen[article.author_id] = day
        rows = []
        for (topic_id, year, month), seen in firsts.items():
            journalists = sorted(a for a in seen if isinstance(authors[a], Journalist))
            professionals = sorted(a for a in seen if isinstance(authors[a], Professional))
            for journalist_id, professional_id in itertools.product(journalists, professionals):
                rows.append({
                    "journalist_id": journalist_id,
                    "professional_id": professional_id,
                    "topic_id": topic_id,
                    "month": f"{year:04d}-{month:02d}",
                    "day": max(seen[journalist_id], seen[professional_id]).isoformat(),
                })
        rows.sort(key=lambda r: (r["day"], r["journalist_id"], r["professional_id"], r["topic_id"]))
        return _top(rows, spec.limit), len(rows)

    # -- diversity ----------------------------------------------------------------------

    def _q10(self, spec: QuerySpec, snap: Snapshot):
        authors = snap.authors
        articles = [
            a for a in snap.between(spec.date_from, spec.date_to)
            if isinstance(authors.get(a.author_id), Journalist)
        ]
        candidates: Set[FrozenSet[str]] = set()
        for article in articles:
            topics = article.topic_ids
            for size in range(spec.min_common_topics, len(topics) + 1):
                candidates.update(frozenset(c) for c in itertools.combinations(topics, size))

        rows = []
        for topic_set in candidates:
            group = [a for a in articles if topic_set.issubset(a.topic_ids)]
            journalists = sorted({a.author_id for a in group})
            if len(journalists) < spec.min_journalists:
                continue
            common = frozenset.intersection(*(frozenset(a.topic_ids) for a in group))
            if common != topic_set:
                continue  # not maximal: a larger topic set describes the same group
            rows.append({
                "topic_ids": sorted(topic_set),
                "article_ids": sorted(a.id for a in group),
                "journalist_ids": journalists,
                "size": len(group),
            })
        rows.sort(key=lambda r: (-r["size"], r["article_ids"][0], r["topic_ids"]))
        return _top(rows, spec.limit), len(rows)

    def _q11(self, spec: QuerySpec, snap: Snapshot):
        counts = Counter(a.language_id for a in snap.articles)
        ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        rows = [
            {"language_id": language_id, "language": snap.label("language", language_id, "code"), "articles": count}
            for language_id, count in ranked
        ]
        return _top(rows, spec.limit), len(rows)

    def _ranked_search(self, spec: QuerySpec, snap: Snapshot, filters: Optional[SearchFilters]):
        ranked = self.backend.search([spec.term], filters)
        rows = [
            {"rank": rank, "article_id": article_id, "title": snap.by_id[article_id].title}
            for rank, article_id in enumerate(ranked, start=1)
            if article_id in snap.by_id
        ]
        return _top(rows, spec.limit), len(rows)

    def _q12(self, spec: QuerySpec, snap: Snapshot):
        return self._ranked_search(spec, snap, SearchFilters(author_id=spec.author_id, country_id=spec.country_id))

    def _ft(self, spec: QuerySpec, snap: Snapshot):
        return self._ranked_search(spec, snap, None)

    def tfidf_vector(self, article: Article, metadata) -> Dict[str, float]:
        """Stored vector of an indexed article, else tf against the index's idf."""
        index = getattr(metadata, "index", None)
        if index is None:
            raise IndexNotBuiltException()
        info = getattr(metadata, "documents", {}).get(article.id)
        if article.id in index and (info is None or info.version in (0, article.version)):
            return index.tfidf_vector(article.id)
        return {term: tf * index.idf(term) for term, tf in Counter(self.tokens_of(article)).items()}

    def _q13(self, spec: QuerySpec, snap: Snapshot):
        metadata = self._require_index()
        source = snap.by_id.get(spec.document_id)
        if source is None:
            raise NotFoundException(spec.document_id)
        target_day = add_years(source.publish_date, 1)
        query = self.tfidf_vector(source, metadata)
        query_norm = math.sqrt(sum(w * w for w in query.values()))
        rows = []
        for candidate in snap.between(target_day, target_day):
            vector = self.tfidf_vector(candidate, metadata)
            norm = math.sqrt(sum(w * w for w in vector.values()))
            dot = sum(w * vector.get(term, 0.0) for term, w in query.items())
            similarity = dot / (query_norm * norm) if query_norm and norm else 0.0
            rows.append({"article_id": candidate.id, "title": candidate.title, "similarity": similarity})
        rows.sort(key=lambda r: (-r["similarity"], r["article_id"]))
        return _top(rows, spec.limit), len(rows)

    def _q14(self, spec: QuerySpec, snap: Snapshot):
        authors = snap.authors
        older: Dict[str, List[str]] = defaultdict(list)
        younger: Dict[str, List[str]] = defaultdict(list)
        for article in snap.articles:
            author = authors.get(article.author_id)
            if not isinstance(author, Journalist):
                continue
            born = author.birth_date.year
            side = older if born < spec.year else younger if born > spec.year else None
            if side is not None:
                for topic_id in article.topic_ids:
                    side[topic_id].append(article.id)
        shared: Dict[Tuple[str, str], List[str]] = defaultdict(list)
        for topic_id in sorted(set(older) & set(younger)):
            for pair in itertools.product(older[topic_id], younger[topic_id]):
                shared[pair].append(topic_id)
        rows = [
            {"older_article_id": a, "younger_article_id": b, "topic_ids": topics}
            for (a, b), topics in sorted(shared.items())
        ]
        return _top(rows, spec.limit), len(rows)


def execute_query(spec: QuerySpec, backend: BackendInterface, current_date: CurrentDate = None) -> QueryResult:
    return QueryEngine(backend, current_date).execute(spec)


def execute_analytic(spec: QuerySpec, backend: BackendInterface, current_date: CurrentDate = None) -> QueryResult:
    if not spec.kind.is_analytic:
        raise QueryArgumentException(spec.kind.value, "not an analytical query kind")
    return QueryEngine(backend, current_date).execute(spec)
