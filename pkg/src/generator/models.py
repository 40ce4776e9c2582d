"""Configuration and manifest models for corpus generation."""

import hashlib
import json
from datetime import date
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

GIB = 2 ** 30

DEFAULT_START_DATE = date(1972, 1, 1)
DEFAULT_END_DATE = date(2011, 12, 31)
DEFAULT_EVENT_DATES = (date(2001, 9, 12), date(2008, 11, 5))
# Spreads the default 0.01 GB corpus over the default window.
DEFAULT_ARTICLES_PER_DAY = 0.1


class GeneratorConfig(BaseModel):
    """Every knob that determines a generated corpus.

    Two equal configs produce byte-identical corpora.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=42, ge=0, lt=2 ** 64)
    scale_factor_gb: float = Field(default=0.01, gt=0, description="Target corpus size in GB (SF)")
    start_date: date = DEFAULT_START_DATE
    end_date: date = DEFAULT_END_DATE

    vocabulary_size: int = Field(default=20000, ge=500)
    zipf_exponent: float = Field(default=1.1, gt=0)
    topic_mix: float = Field(default=0.6, ge=0.0, le=1.0, description="Share of body tokens from topic bands")
    planted_topic_vocabularies: bool = Field(
        default=False, description="One topic per article, every token from that topic's band"
    )

    min_authors: int = Field(default=16, ge=1)
    authors_per_gb: float = Field(default=4000.0, ge=0)
    topics_total: int = Field(default=24, ge=2)
    keywords_per_topic: int = Field(default=20, ge=1)
    languages_total: int = Field(default=8, ge=1)
    countries_total: int = Field(default=30, ge=1)
    media_ratio: float = Field(default=0.15, ge=0.0, le=1.0)

    articles_per_day: float = Field(
        default=DEFAULT_ARTICLES_PER_DAY, gt=0, description="Publication rate on an ordinary day, independent of SF"
    )
    event_dates: Tuple[date, ...] = DEFAULT_EVENT_DATES
    event_weight: float = Field(default=30.0, ge=1.0, description="Relative volume on event dates")

    body_tokens_min: int = Field(default=300, ge=1)
    body_tokens_max: int = Field(default=700, ge=1)
    slice_bytes: int = Field(default=2 ** 20, ge=4096, description="Manifest slice granularity")

    @model_validator(mode="after")
    def check_ranges(self) -> "GeneratorConfig":
        if self.start_date >= self.end_date:
            raise ValueError("time window must have start_date < end_date")
        if self.body_tokens_min > self.body_tokens_max:
            raise ValueError("body_tokens_min must not exceed body_tokens_max")
        return self

    @property
    def target_bytes(self) -> int:
        return int(round(self.scale_factor_gb * GIB))

    @property
    def window_days(self) -> int:
        return (self.end_date - self.start_date).days + 1


class UnitEntry(BaseModel):
    """Position of one corpus unit (article with its media and new authors) in the stream."""

    model_config = ConfigDict(frozen=True)

    index: int
    article_id: str
    publish_date: date
    offset: int = Field(..., description="Byte offset of the unit within the corpus")
    byte_size: int
    author_ids: Tuple[str, ...] = ()
    media_ids: Tuple[str, ...] = ()


class SliceBoundary(BaseModel):
    model_config = ConfigDict(frozen=True)

    slice_index: int
    first_article_id: Optional[str]
    last_article_id: Optional[str]
    byte_size: int


class CorpusManifest(BaseModel):
    """Deterministic description of a generated corpus."""

    model_config = ConfigDict(frozen=True)

    config: GeneratorConfig
    total_bytes: int
    shared_bytes: int
    article_count: int
    slice_boundaries: List[SliceBoundary]
    per_entity_counts: Dict[str, int]
    units: List[UnitEntry]
    corpus_digest: str = Field(..., description="SHA-256 over every emitted byte, in stream order")

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()
