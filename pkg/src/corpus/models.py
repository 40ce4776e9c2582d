"""Domain entities of the news-hub schema.

All entities are immutable pydantic models. Collections are normalized to
tuples sorted by id on construction so that two equal entities always
serialize to the same bytes.
"""

import datetime as dt
import re
from datetime import date
from enum import Enum
from typing import Annotated, Dict, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


YEAR_MONTH_PATTERN = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")


class EntityModel(BaseModel):
    """Base for every corpus entity."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(..., min_length=1, description="Unique identifier within the entity class")


def _sorted_unique(values) -> Tuple[str, ...]:
    return tuple(sorted(set(values)))


class AuthorKind(str, Enum):
    """Closed set of concrete author subtypes."""

    JOURNALIST = "journalist"
    PROFESSIONAL = "professional"


class MediaKind(str, Enum):
    """Media file classes."""

    AUDIO = "audio"
    VIDEO = "video"


class DocumentKind(str, Enum):
    """Which text a metadata record was computed from."""

    ARTICLE = "article"
    TRANSCRIPT = "transcript"


class Topic(EntityModel):
    """A curated topic an article may belong to."""

    label: str = Field(..., min_length=1)


class Keyword(EntityModel):
    """A word or short phrase roughly describing an article."""

    word: str = Field(..., min_length=1)


class Language(EntityModel):
    """Language/dialect mark of an article."""

    code: str = Field(..., min_length=2)
    dialect: str = Field(default="")


class Country(EntityModel):
    """Country an author is a citizen of or works in."""

    name: str = Field(..., min_length=1)
    iso_code: str = Field(..., min_length=2, max_length=3)


class DateInfo(BaseModel):
    """Calendar information about the day an article was written.

    Derived entirely from ``date``; stored values must agree with it.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    date: dt.date
    day_of_year: int = Field(..., ge=1, le=366)
    weekday: int = Field(..., ge=0, le=6, description="Monday is 0")

    @classmethod
    def from_date(cls, value: dt.date) -> "DateInfo":
        return cls(date=value, day_of_year=value.timetuple().tm_yday, weekday=value.weekday())

    @model_validator(mode="after")
    def check_derivable(self) -> "DateInfo":
        if self.day_of_year != self.date.timetuple().tm_yday or self.weekday != self.date.weekday():
            raise ValueError("dateinfo.derivable: day_of_year/weekday disagree with date")
        return self

    @property
    def id(self) -> str:
        return self.date.isoformat()


class Author(EntityModel):
    """Abstract author supertype; only Journalist and Professional are instantiable."""

    kind: AuthorKind
    name: str = Field(..., min_length=1)
    birth_date: date
    citizenship_country_id: str
    work_country_id: str

    @model_validator(mode="after")
    def check_closed_hierarchy(self) -> "Author":
        if type(self) is Author:
            raise ValueError("author.closed_hierarchy: Author is abstract, use Journalist or Professional")
        return self


class Journalist(Author):
    """Author working for a journal and giving interviews."""

    kind: Literal[AuthorKind.JOURNALIST] = AuthorKind.JOURNALIST
    employer_journal: str = Field(..., min_length=1)
    interview_count: int = Field(default=0, ge=0)


class Professional(Author):
    """Specialist in a topic writing special analyses."""

    kind: Literal[AuthorKind.PROFESSIONAL] = AuthorKind.PROFESSIONAL
    specialty_topic_id: str = Field(..., min_length=1)


AnyAuthor = Annotated[Union[Journalist, Professional], Field(discriminator="kind")]


class MediaRef(EntityModel):
    """Reference to an audio or video file attached to an article."""

    article_id: str = Field(..., min_length=1, description="Article the media file belongs to")
    kind: MediaKind
    byte_size: int = Field(..., gt=0)
    internal_comment: str = ""
    payload_digest: str = Field(..., min_length=64, max_length=64, description="SHA-256 of the payload")
    transcript: str

    @field_validator("transcript")
    @classmethod
    def check_transcript(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("media.transcript_non_empty: transcript must not be empty")
        return v


class Article(EntityModel):
    """A versioned news article."""

    title: str
    body: str
    version: int = Field(default=1, ge=1)
    author_id: str = Field(..., min_length=1)
    topic_ids: Tuple[str, ...] = ()
    keyword_ids: Tuple[str, ...] = ()
    language_id: str = Field(..., min_length=1)
    country_id: str = Field(..., min_length=1, description="Country the article reports from")
    publish_date: date
    media_ids: Tuple[str, ...] = ()
    citations: Tuple[str, ...] = Field(default=(), description="Cited article ids, with multiplicity")
    page_count: int = Field(default=1, ge=1)
    monthly_views: Dict[str, int] = Field(default_factory=dict, description="YYYY-MM -> views")

    @field_validator("topic_ids", "keyword_ids", "media_ids", mode="before")
    @classmethod
    def normalize_id_set(cls, v):
        return _sorted_unique(v or ())

    @field_validator("citations", mode="before")
    @classmethod
    def normalize_citations(cls, v):
        return tuple(sorted(v or ()))

    @field_validator("monthly_views")
    @classmethod
    def check_monthly_views(cls, v: Dict[str, int]) -> Dict[str, int]:
        for key, views in v.items():
            if not YEAR_MONTH_PATTERN.match(key):
                raise ValueError(f"article.monthly_views_key: {key!r} is not YYYY-MM")
            if views < 0:
                raise ValueError(f"article.monthly_views_non_negative: {key} has {views}")
        return dict(sorted(v.items()))

    @model_validator(mode="after")
    def check_no_self_citation(self) -> "Article":
        if self.id in self.citations:
            raise ValueError("article.no_self_citation: citations include the article's own id")
        return self

    def views_in(self, year: int, month: int) -> int:
        return self.monthly_views.get(f"{year:04d}-{month:02d}", 0)

    def with_update(self, new_body: str) -> "Article":
        """Next version of this article carrying a new body."""
        return self.model_copy(update={"body": new_body, "version": self.version + 1})


class MetadataRecord(BaseModel):
    """Information-retrieval metadata extracted for one document."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    document_id: str = Field(..., min_length=1)
    article_id: str = Field(..., min_length=1)
    kind: DocumentKind = DocumentKind.ARTICLE
    term_frequencies: Dict[str, int] = Field(default_factory=dict)
    tfidf_vector: Dict[str, float] = Field(default_factory=dict)
    pagerank_score: float = Field(..., gt=0.0, le=1.0)
    topic_distribution: Dict[int, float] = Field(default_factory=dict)

    @field_validator("term_frequencies", "tfidf_vector")
    @classmethod
    def sort_terms(cls, v):
        return dict(sorted(v.items()))

    @field_validator("topic_distribution")
    @classmethod
    def check_distribution(cls, v: Dict[int, float]) -> Dict[int, float]:
        if v and abs(sum(v.values()) - 1.0) > 1e-9:
            raise ValueError(f"metadata.topic_distribution_normalized: sums to {sum(v.values())!r}")
        return dict(sorted(v.items()))

    @property
    def id(self) -> str:
        return self.document_id


ReferenceEntity = Union[Topic, Keyword, Language, Country, Journalist, Professional, MediaRef]
Entity = Union[Article, Topic, Keyword, Language, Country, Journalist, Professional, MediaRef, DateInfo, MetadataRecord]


def entity_kind(entity: Entity) -> str:
    """Storage kind name of an entity (also its XML root tag)."""
    if isinstance(entity, Author):
        return "author"
    kinds = {
        Article: "article",
        Topic: "topic",
        Keyword: "keyword",
        Language: "language",
        Country: "country",
        MediaRef: "media",
        DateInfo: "dateinfo",
        MetadataRecord: "metadata-record",
    }
    for cls, kind in kinds.items():
        if isinstance(entity, cls):
            return kind
    raise TypeError(f"Not a corpus entity: {type(entity).__name__}")


def is_journalist(author: Optional[Author]) -> bool:
    return isinstance(author, Journalist)
