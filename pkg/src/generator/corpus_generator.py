"""Deterministic synthetic news-hub corpus generator.

The corpus is an unbounded, prefix-stable stream of units. Unit ``i`` draws
from its own random stream seeded by ``(seed, i)`` and its publication day
follows from a fixed daily rate, so the first ``n`` units never depend on how
many follow or on the scale factor. A corpus of scale factor SF is the prefix
whose serialized size lands closest to ``SF * 2**30`` bytes. Units past the
window's capacity are published on its last day.
"""

import hashlib
import math
from datetime import date, timedelta
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from ..corpus.models import (
    Article,
    Author,
    Country,
    Journalist,
    Keyword,
    Language,
    MediaKind,
    MediaRef,
    Professional,
    Topic,
)
from ..corpus.xml_codec import serialize_entity
from ..logging_config import LoggingMixin, log_performance
from .dataset import CorpusUnit, GeneratedCorpus
from .exceptions import GeneratorConfigException
from .models import GIB, CorpusManifest, GeneratorConfig, SliceBoundary, UnitEntry
from .vocabulary import Vocabulary

# Independent random streams derived from the seed.
_UNIT_STREAM = 1
_AUTHOR_STREAM = 2
_INSERT_STREAM = 3
_SHARED_STREAM = 4

VIEW_MONTHS = 24

TOPIC_LABELS = [
    "politics", "economy", "science", "health", "sports", "culture", "technology", "environment",
    "education", "travel", "business", "law", "religion", "fashion", "food", "music",
    "cinema", "literature", "history", "military", "space", "energy", "agriculture", "weather",
]

LANGUAGES = [
    ("en", "US"), ("en", "GB"), ("es", "ES"), ("es", "MX"), ("fr", "FR"), ("de", "DE"),
    ("it", "IT"), ("pt", "BR"), ("pt", "PT"), ("nl", "NL"), ("ca", "ES"), ("sv", "SE"),
]

COUNTRIES = [
    ("United States", "US"), ("United Kingdom", "GB"), ("Spain", "ES"), ("France", "FR"),
    ("Germany", "DE"), ("Italy", "IT"), ("Portugal", "PT"), ("Brazil", "BR"), ("Mexico", "MX"),
    ("Argentina", "AR"), ("Canada", "CA"), ("Japan", "JP"), ("China", "CN"), ("India", "IN"),
    ("Australia", "AU"), ("Netherlands", "NL"), ("Sweden", "SE"), ("Norway", "NO"), ("Egypt", "EG"),
    ("South Africa", "ZA"), ("Nigeria", "NG"), ("Kenya", "KE"), ("Russia", "RU"), ("Turkey", "TR"),
    ("Greece", "GR"), ("Poland", "PL"), ("Chile", "CL"), ("Peru", "PE"), ("Korea", "KR"), ("Israel", "IL"),
]

JOURNALS = [
    "New Pork Times", "Daily Ledger", "Evening Courier", "Morning Herald", "Global Wire",
    "Metro Gazette", "Harbor Tribune", "Capital Post",
]

FIRST_NAMES = [
    "Ana", "Marc", "Laura", "Jordi", "Elena", "Pau", "Marta", "David", "Sara", "Oriol",
    "Nuria", "Josep", "Clara", "Victor", "Irene", "Hugo",
]
LAST_NAMES = [
    "Garcia", "Puig", "Serra", "Vidal", "Ferrer", "Roca", "Soler", "Mas", "Costa", "Font",
    "Pons", "Riera", "Camps", "Vila", "Sala", "Prat",
]

MEDIA_COMMENTS = ["raw take", "edited cut", "desk copy", "field recording", "archive transfer"]


def article_id(index: int) -> str:
    return f"art-{index:08d}"


def author_id(index: int) -> str:
    return f"aut-{index:05d}"


def insert_id(sequence: int) -> str:
    return f"ins-{sequence:08d}"


def _uniform_date(rng: np.random.Generator, low: date, high: date) -> date:
    span = (high - low).days
    return low + timedelta(days=int(rng.integers(0, span + 1)))


class CorpusGenerator(LoggingMixin):
    """Produces the shared reference pools and the unit stream for one config."""

    def __init__(self, config: GeneratorConfig):
        self.config = config
        self.vocabulary = Vocabulary(config)
        self.topic_mix = 1.0 if config.planted_topic_vocabularies else config.topic_mix

        self.topics = self._build_topics()
        self.keywords = self._build_keywords()
        self.languages = self._build_languages()
        self.countries = self._build_countries()
        self._language_cdf = np.cumsum(1.0 / np.arange(1, len(self.languages) + 1))
        self._language_cdf /= self._language_cdf[-1]

        weights = np.ones(config.window_days, dtype=np.float64)
        for event in config.event_dates:
            if config.start_date <= event <= config.end_date:
                weights[(event - config.start_date).days] = config.event_weight
        self.articles_per_day = config.articles_per_day
        self._day_capacity = np.cumsum(weights) * self.articles_per_day

    @property
    def window_capacity(self) -> int:
        """Articles the window holds before units pile onto its last day."""
        return int(math.ceil(self._day_capacity[-1]))

    # -- shared pools ---------------------------------------------------------------

    def _build_topics(self) -> List[Topic]:
        topics = []
        for t in range(self.config.topics_total):
            base = TOPIC_LABELS[t % len(TOPIC_LABELS)]
            label = base if t < len(TOPIC_LABELS) else f"{base}-{t // len(TOPIC_LABELS)}"
            topics.append(Topic(id=f"top-{t:03d}", label=label))
        return topics

    def _build_keywords(self) -> List[Keyword]:
        per_topic = self.config.keywords_per_topic
        return [
            Keyword(id=f"kw-{t * per_topic + j:05d}", word=self.vocabulary.keyword_word(t, j))
            for t in range(self.config.topics_total)
            for j in range(per_topic)
        ]

    def _build_languages(self) -> List[Language]:
        languages = []
        for n in range(self.config.languages_total):
            if n < len(LANGUAGES):
                code, dialect = LANGUAGES[n]
            else:
                code, dialect = f"x{n:02d}", ""
            languages.append(Language(id=f"lang-{n:02d}", code=code, dialect=dialect))
        return languages

    def _build_countries(self) -> List[Country]:
        countries = []
        for n in range(self.config.countries_total):
            if n < len(COUNTRIES):
                name, iso = COUNTRIES[n]
            else:
                name, iso = f"Territory {n}", f"X{n % 100:02d}"
            countries.append(Country(id=f"cty-{n:03d}", name=name, iso_code=iso))
        return countries

    def shared_entities(self) -> List:
        return [*self.topics, *self.keywords, *self.languages, *self.countries]

    def topic_index(self, topic_id: str) -> int:
        return int(topic_id.split("-")[1])

    # -- calendar -------------------------------------------------------------------

    def day_of(self, index: int) -> int:
        day = int(np.searchsorted(self._day_capacity, index, side="right"))
        return min(day, len(self._day_capacity) - 1)

    def first_index_of_day(self, day: int) -> int:
        return 0 if day == 0 else int(math.ceil(self._day_capacity[day - 1]))

    # -- authors --------------------------------------------------------------------

    def available_authors(self, bytes_before: int) -> int:
        joined = int(bytes_before * self.config.authors_per_gb / GIB)
        return self.config.min_authors + joined

    def build_author(self, index: int, first_publish: date) -> Author:
        rng = np.random.default_rng([self.config.seed, _AUTHOR_STREAM, index])
        if index < self.config.min_authors:
            latest_birth_year = self.config.start_date.year - 16
        else:
            latest_birth_year = min(1990, first_publish.year - 16)
        earliest_birth_year = min(1940, latest_birth_year - 10)
        birth = _uniform_date(rng, date(earliest_birth_year, 1, 1), date(latest_birth_year, 12, 31))
        citizenship = self.countries[int(rng.integers(len(self.countries)))].id
        work = citizenship if rng.random() < 0.8 else self.countries[int(rng.integers(len(self.countries)))].id
        name = f"{FIRST_NAMES[int(rng.integers(len(FIRST_NAMES)))]} {LAST_NAMES[int(rng.integers(len(LAST_NAMES)))]}"
        common = dict(
            id=author_id(index),
            name=name,
            birth_date=birth,
            citizenship_country_id=citizenship,
            work_country_id=work,
        )
        if rng.random() < 0.7:
            return Journalist(
                **common,
                employer_journal=JOURNALS[int(rng.integers(len(JOURNALS)))],
                interview_count=int(rng.integers(0, 200)),
            )
        return Professional(**common, specialty_topic_id=self.topics[int(rng.integers(len(self.topics)))].id)

    # -- article content ------------------------------------------------------------

    def _pick_topics(self, rng: np.random.Generator) -> List[int]:
        count = 1 if self.config.planted_topic_vocabularies else int(rng.integers(1, 4))
        chosen = rng.choice(len(self.topics), size=count, replace=False)
        return [int(t) for t in chosen]

    def _pick_keywords(self, rng: np.random.Generator, topic_indices: List[int]) -> List[str]:
        per_topic = self.config.keywords_per_topic
        candidates = [self.keywords[t * per_topic + j].id for t in topic_indices for j in range(per_topic)]
        weights = np.array([1.0 / (1 + (n % per_topic)) for n in range(len(candidates))])
        picks = rng.choice(len(candidates), size=int(rng.integers(2, 6)), p=weights / weights.sum())
        return [candidates[int(p)] for p in picks]

    def _monthly_views(self, rng: np.random.Generator, published: date) -> Dict[str, int]:
        base = rng.lognormal(mean=6.0, sigma=1.2)
        noise = rng.lognormal(mean=0.0, sigma=0.3, size=VIEW_MONTHS)
        views = {}
        year, month = published.year, published.month
        for m in range(VIEW_MONTHS):
            views[f"{year:04d}-{month:02d}"] = int(base * (0.85 ** m) * noise[m])
            month += 1
            if month > 12:
                year, month = year + 1, 1
        return views

    def _build_media(
        self, rng: np.random.Generator, index: int, topic_indices: List[int]
    ) -> List[Tuple[MediaRef, bytes]]:
        if rng.random() >= self.config.media_ratio:
            return []
        count = 2 if rng.random() < 0.2 else 1
        media = []
        for k in range(count):
            kind = MediaKind.VIDEO if rng.random() < 0.4 else MediaKind.AUDIO
            low, high = (8192, 16384) if kind is MediaKind.VIDEO else (2048, 8192)
            payload = rng.bytes(int(rng.integers(low, high + 1)))
            transcript = self.vocabulary.sample_text(rng, topic_indices, int(rng.integers(40, 121)), self.topic_mix)
            media.append((
                MediaRef(
                    id=f"med-{index:08d}-{k}",
                    article_id=article_id(index),
                    kind=kind,
                    byte_size=len(payload),
                    internal_comment=MEDIA_COMMENTS[int(rng.integers(len(MEDIA_COMMENTS)))],
                    payload_digest=hashlib.sha256(payload).hexdigest(),
                    transcript=" ".join(transcript),
                ),
                payload,
            ))
        return media

    def _citations(self, rng: np.random.Generator, day: int) -> List[str]:
        count = int(rng.poisson(2.0))
        offsets = np.floor(rng.exponential(scale=1.0, size=count) * max(1.0, self.articles_per_day * 180))
        first = self.first_index_of_day(day)
        if first == 0:
            return []
        targets = np.clip(first - 1 - offsets.astype(np.int64), 0, first - 1)
        return [article_id(int(t)) for t in targets]

    # -- the stream -----------------------------------------------------------------

    def iter_units(self, initial_bytes: int = 0) -> Iterator[CorpusUnit]:
        """Endless unit stream; ``initial_bytes`` is the shared-pool size preceding it."""
        emitted_authors: Dict[str, Author] = {}
        bytes_so_far = initial_bytes
        index = 0
        while True:
            unit = self._build_unit(index, bytes_so_far, emitted_authors)
            emitted_authors.update((a.id, a) for a in unit.authors)
            bytes_so_far += unit.byte_size
            yield unit
            index += 1

    def _build_unit(self, index: int, bytes_before: int, emitted_authors: Dict[str, Author]) -> CorpusUnit:
        rng = np.random.default_rng([self.config.seed, _UNIT_STREAM, index])
        day = self.day_of(index)
        published = self.config.start_date + timedelta(days=day)

        topic_indices = self._pick_topics(rng)
        author_index = int(rng.integers(self.available_authors(bytes_before)))
        new_authors: Tuple[Author, ...] = ()
        author = emitted_authors.get(author_id(author_index))
        if author is None:
            author = self.build_author(author_index, published)
            new_authors = (author,)

        language = self.languages[int(np.searchsorted(self._language_cdf, rng.random(), side="right"))]
        country = author.work_country_id if rng.random() < 0.7 else self.countries[
            int(rng.integers(len(self.countries)))
        ].id

        keyword_ids = self._pick_keywords(rng, topic_indices)
        body = self.vocabulary.sample_text(
            rng, topic_indices, int(rng.integers(self.config.body_tokens_min, self.config.body_tokens_max + 1)),
            self.topic_mix,
        )
        title = self.vocabulary.sample_text(rng, topic_indices, int(rng.integers(4, 9)), self.topic_mix)
        citations = self._citations(rng, day)
        page_count = int(rng.integers(1, 31))
        views = self._monthly_views(rng, published)
        media = self._build_media(rng, index, topic_indices)

        article = Article(
            id=article_id(index),
            title=" ".join(title).capitalize(),
            body=" ".join(body),
            version=1,
            author_id=author_id(author_index),
            topic_ids=[self.topics[t].id for t in topic_indices],
            keyword_ids=keyword_ids,
            language_id=language.id,
            country_id=country,
            publish_date=published,
            media_ids=[m.id for m, _ in media],
            citations=citations,
            page_count=page_count,
            monthly_views=views,
        )
        size = len(serialize_entity(article))
        size += sum(len(serialize_entity(m)) + len(payload) for m, payload in media)
        size += sum(len(serialize_entity(a)) for a in new_authors)
        return CorpusUnit(index=index, article=article, media=tuple(media), authors=new_authors, byte_size=size)

    def synthesize_article(self, sequence: int, author: Author, publish_date: date) -> Article:
        """Extra article outside the corpus id space, referencing only shared pools and ``author``."""
        rng = np.random.default_rng([self.config.seed, _INSERT_STREAM, sequence])
        topic_indices = self._pick_topics(rng)
        body = self.vocabulary.sample_text(
            rng, topic_indices, int(rng.integers(self.config.body_tokens_min, self.config.body_tokens_max + 1)),
            self.topic_mix,
        )
        title = self.vocabulary.sample_text(rng, topic_indices, int(rng.integers(4, 9)), self.topic_mix)
        return Article(
            id=insert_id(sequence),
            title=" ".join(title).capitalize(),
            body=" ".join(body),
            author_id=author.id,
            topic_ids=[self.topics[t].id for t in topic_indices],
            keyword_ids=self._pick_keywords(rng, topic_indices),
            language_id=self.languages[0].id,
            country_id=author.work_country_id,
            publish_date=publish_date,
            page_count=int(rng.integers(1, 31)),
            monthly_views=self._monthly_views(rng, publish_date),
        )


def _select_prefix(units: Iterator[CorpusUnit], start_bytes: int, target: int) -> List[CorpusUnit]:
    selected: List[CorpusUnit] = []
    total = start_bytes
    for unit in units:
        if total >= target:
            break
        if total + unit.byte_size > target and (total + unit.byte_size - target) > (target - total):
            break
        selected.append(unit)
        total += unit.byte_size
    return selected


def _slice_boundaries(entries: Sequence[UnitEntry], shared_bytes: int, slice_bytes: int) -> List[SliceBoundary]:
    total = shared_bytes + sum(e.byte_size for e in entries)
    count = max(1, math.ceil(total / slice_bytes))
    buckets: List[List[UnitEntry]] = [[] for _ in range(count)]
    for entry in entries:
        buckets[min(entry.offset // slice_bytes, count - 1)].append(entry)
    boundaries = []
    for n, bucket in enumerate(buckets):
        size = sum(e.byte_size for e in bucket) + (shared_bytes if n == 0 else 0)
        boundaries.append(SliceBoundary(
            slice_index=n,
            first_article_id=bucket[0].article_id if bucket else None,
            last_article_id=bucket[-1].article_id if bucket else None,
            byte_size=size,
        ))
    return boundaries


def generate_corpus(config: GeneratorConfig) -> GeneratedCorpus:
    """Generate the corpus described by ``config``."""
    generator = CorpusGenerator(config)
    logger = generator.logger
    shared = generator.shared_entities()
    shared_payloads = [serialize_entity(e) for e in shared]
    shared_bytes = sum(len(p) for p in shared_payloads)
    target = config.target_bytes

    with log_performance("generate_corpus", logger):
        units = _select_prefix(generator.iter_units(shared_bytes), shared_bytes, target)
        if not units:
            raise GeneratorConfigException(
                f"scale factor {config.scale_factor_gb} GB ({target} bytes) cannot hold one article "
                f"after {shared_bytes} bytes of shared entities",
                field="scale_factor_gb",
            )
        if len(units) > generator.window_capacity:
            logger.warning(
                "%d of %d articles exceed the window at %g articles/day and are published on %s",
                len(units) - generator.window_capacity, len(units), config.articles_per_day, config.end_date,
            )

    digest = hashlib.sha256()
    for payload in shared_payloads:
        digest.update(payload)
    entries = []
    offset = shared_bytes
    counts: Dict[str, int] = {
        "topic": len(generator.topics),
        "keyword": len(generator.keywords),
        "language": len(generator.languages),
        "country": len(generator.countries),
        "author": 0,
        "article": 0,
        "media": 0,
    }
    for unit in units:
        for author in unit.authors:
            digest.update(serialize_entity(author))
        digest.update(serialize_entity(unit.article))
        for media, payload in unit.media:
            digest.update(serialize_entity(media))
            digest.update(payload)
        entries.append(UnitEntry(
            index=unit.index,
            article_id=unit.article.id,
            publish_date=unit.article.publish_date,
            offset=offset,
            byte_size=unit.byte_size,
            author_ids=tuple(a.id for a in unit.authors),
            media_ids=tuple(m.id for m, _ in unit.media),
        ))
        offset += unit.byte_size
        counts["author"] += len(unit.authors)
        counts["article"] += 1
        counts["media"] += len(unit.media)

    manifest = CorpusManifest(
        config=config,
        total_bytes=offset,
        shared_bytes=shared_bytes,
        article_count=len(units),
        slice_boundaries=_slice_boundaries(entries, shared_bytes, config.slice_bytes),
        per_entity_counts=counts,
        units=entries,
        corpus_digest=digest.hexdigest(),
    )
    logger.info(
        "Generated corpus seed=%d sf=%g: %d articles, %d bytes (target %d)",
        config.seed, config.scale_factor_gb, len(units), offset, target,
    )
    return GeneratedCorpus(manifest, shared, units)
