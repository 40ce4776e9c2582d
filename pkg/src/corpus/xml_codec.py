"""Canonical XML encoding of corpus entities.

Every entity kind has one explicit encoder and one decoder. Output is UTF-8
with LF line endings, two-space indentation and no trailing newline, so the
bytes are a pure function of the entity and any strict prefix of a document
fails to parse.
"""

import xml.etree.ElementTree as ET
from collections import Counter, defaultdict
from datetime import date
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from pydantic import ValidationError

from ..logging_config import get_logger
from .exceptions import (
    CodecException,
    DanglingReferenceException,
    SchemaException,
    SerializationException,
    XMLParseException,
)
from .models import (
    Article,
    Author,
    AuthorKind,
    Country,
    DateInfo,
    DocumentKind,
    Entity,
    Journalist,
    Keyword,
    Language,
    MediaKind,
    MediaRef,
    MetadataRecord,
    Professional,
    Topic,
    entity_kind,
)

logger = get_logger(__name__)

XML_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'
MIN_AUTHOR_AGE_YEARS = 15


# ---------------------------------------------------------------------------
# element helpers
# ---------------------------------------------------------------------------

def _text(parent: ET.Element, tag: str, value) -> ET.Element:
    child = ET.SubElement(parent, tag)
    child.text = "" if value is None else str(value)
    return child


def _id_list(parent: ET.Element, tag: str, item_tag: str, values: Iterable[str]) -> None:
    container = ET.SubElement(parent, tag)
    for value in values:
        _text(container, item_tag, value)


def _child(element: ET.Element, tag: str) -> ET.Element:
    child = element.find(tag)
    if child is None:
        raise SchemaException(f"missing <{tag}>", element=element.tag)
    return child


def _get_text(element: ET.Element, tag: str) -> str:
    return _child(element, tag).text or ""


def _get_int(element: ET.Element, tag: str) -> int:
    raw = _get_text(element, tag)
    try:
        return int(raw)
    except ValueError as e:
        raise SchemaException(f"<{tag}> is not an integer: {raw!r}", element=element.tag) from e


def _get_float(raw: str, tag: str) -> float:
    try:
        return float(raw)
    except ValueError as e:
        raise SchemaException(f"<{tag}> is not a number: {raw!r}", element=tag) from e


def _get_date(element: ET.Element, tag: str) -> date:
    raw = _get_text(element, tag)
    try:
        return date.fromisoformat(raw)
    except ValueError as e:
        raise SchemaException(f"<{tag}> is not an ISO date: {raw!r}", element=element.tag) from e


def _get_ids(element: ET.Element, tag: str, item_tag: str) -> List[str]:
    return [item.text or "" for item in _child(element, tag).findall(item_tag)]


def _attr(element: ET.Element, name: str) -> str:
    value = element.get(name)
    if value is None:
        raise SchemaException(f"missing attribute {name!r}", element=element.tag)
    return value


# ---------------------------------------------------------------------------
# encoders
# ---------------------------------------------------------------------------

def _encode_article(article: Article) -> ET.Element:
    root = ET.Element("article", {"id": article.id, "version": str(article.version)})
    _text(root, "title", article.title)
    _text(root, "body", article.body)
    _text(root, "author-id", article.author_id)
    _id_list(root, "topics", "topic-ref", article.topic_ids)
    _id_list(root, "keywords", "keyword-ref", article.keyword_ids)
    _text(root, "language-id", article.language_id)
    _text(root, "country-id", article.country_id)
    _text(root, "publish-date", article.publish_date.isoformat())
    _id_list(root, "media", "media-ref", article.media_ids)
    _id_list(root, "citations", "cite", article.citations)
    _text(root, "page-count", article.page_count)
    views = ET.SubElement(root, "monthly-views")
    for month, count in article.monthly_views.items():
        _text(views, "month", count).set("key", month)
    return root


def _encode_author(author: Author) -> ET.Element:
    root = ET.Element("author", {"id": author.id, "subtype": author.kind.value})
    _text(root, "name", author.name)
    _text(root, "birth-date", author.birth_date.isoformat())
    _text(root, "citizenship-country-id", author.citizenship_country_id)
    _text(root, "work-country-id", author.work_country_id)
    if isinstance(author, Journalist):
        _text(root, "employer-journal", author.employer_journal)
        _text(root, "interview-count", author.interview_count)
    elif isinstance(author, Professional):
        _text(root, "specialty-topic-id", author.specialty_topic_id)
    return root


def _encode_topic(topic: Topic) -> ET.Element:
    root = ET.Element("topic", {"id": topic.id})
    _text(root, "label", topic.label)
    return root


def _encode_keyword(keyword: Keyword) -> ET.Element:
    root = ET.Element("keyword", {"id": keyword.id})
    _text(root, "word", keyword.word)
    return root


def _encode_language(language: Language) -> ET.Element:
    root = ET.Element("language", {"id": language.id})
    _text(root, "code", language.code)
    _text(root, "dialect", language.dialect)
    return root


def _encode_country(country: Country) -> ET.Element:
    root = ET.Element("country", {"id": country.id})
    _text(root, "name", country.name)
    _text(root, "iso-code", country.iso_code)
    return root


def _encode_media(media: MediaRef) -> ET.Element:
    root = ET.Element("media", {"id": media.id, "kind": media.kind.value})
    _text(root, "article-id", media.article_id)
    _text(root, "byte-size", media.byte_size)
    _text(root, "internal-comment", media.internal_comment)
    _text(root, "payload-digest", media.payload_digest)
    _text(root, "transcript", media.transcript)
    return root


def _encode_dateinfo(info: DateInfo) -> ET.Element:
    root = ET.Element("dateinfo")
    _text(root, "date", info.date.isoformat())
    _text(root, "day-of-year", info.day_of_year)
    _text(root, "weekday", info.weekday)
    return root


def _encode_metadata(record: MetadataRecord) -> ET.Element:
    root = ET.Element(
        "metadata-record",
        {"document-id": record.document_id, "article-id": record.article_id, "kind": record.kind.value},
    )
    _text(root, "pagerank-score", repr(record.pagerank_score))
    frequencies = ET.SubElement(root, "term-frequencies")
    for term, tf in record.term_frequencies.items():
        ET.SubElement(frequencies, "term", {"word": term, "tf": str(tf)})
    vector = ET.SubElement(root, "tfidf-vector")
    for term, weight in record.tfidf_vector.items():
        ET.SubElement(vector, "term", {"word": term, "weight": repr(weight)})
    distribution = ET.SubElement(root, "topic-distribution")
    for index, probability in record.topic_distribution.items():
        _text(distribution, "topic", repr(probability)).set("index", str(index))
    return root


_ENCODERS: Dict[str, Callable] = {
    "article": _encode_article,
    "author": _encode_author,
    "topic": _encode_topic,
    "keyword": _encode_keyword,
    "language": _encode_language,
    "country": _encode_country,
    "media": _encode_media,
    "dateinfo": _encode_dateinfo,
    "metadata-record": _encode_metadata,
}


# ---------------------------------------------------------------------------
# decoders
# ---------------------------------------------------------------------------

def _decode_article(root: ET.Element) -> Article:
    views = {}
    for month in _child(root, "monthly-views").findall("month"):
        views[_attr(month, "key")] = int(month.text or "0")
    return Article(
        id=_attr(root, "id"),
        version=int(_attr(root, "version")),
        title=_get_text(root, "title"),
        body=_get_text(root, "body"),
        author_id=_get_text(root, "author-id"),
        topic_ids=_get_ids(root, "topics", "topic-ref"),
        keyword_ids=_get_ids(root, "keywords", "keyword-ref"),
        language_id=_get_text(root, "language-id"),
        country_id=_get_text(root, "country-id"),
        publish_date=_get_date(root, "publish-date"),
        media_ids=_get_ids(root, "media", "media-ref"),
        citations=_get_ids(root, "citations", "cite"),
        page_count=_get_int(root, "page-count"),
        monthly_views=views,
    )


def _decode_author(root: ET.Element) -> Author:
    subtype = _attr(root, "subtype")
    common = {
        "id": _attr(root, "id"),
        "name": _get_text(root, "name"),
        "birth_date": _get_date(root, "birth-date"),
        "citizenship_country_id": _get_text(root, "citizenship-country-id"),
        "work_country_id": _get_text(root, "work-country-id"),
    }
    if subtype == AuthorKind.JOURNALIST.value:
        return Journalist(
            **common,
            employer_journal=_get_text(root, "employer-journal"),
            interview_count=_get_int(root, "interview-count"),
        )
    if subtype == AuthorKind.PROFESSIONAL.value:
        return Professional(**common, specialty_topic_id=_get_text(root, "specialty-topic-id"))
    raise SchemaException(f"unknown author subtype {subtype!r}", element="author")


def _decode_topic(root: ET.Element) -> Topic:
    return Topic(id=_attr(root, "id"), label=_get_text(root, "label"))


def _decode_keyword(root: ET.Element) -> Keyword:
    return Keyword(id=_attr(root, "id"), word=_get_text(root, "word"))


def _decode_language(root: ET.Element) -> Language:
    return Language(id=_attr(root, "id"), code=_get_text(root, "code"), dialect=_get_text(root, "dialect"))


def _decode_country(root: ET.Element) -> Country:
    return Country(id=_attr(root, "id"), name=_get_text(root, "name"), iso_code=_get_text(root, "iso-code"))


def _decode_media(root: ET.Element) -> MediaRef:
    kind = _attr(root, "kind")
    if kind not in {k.value for k in MediaKind}:
        raise SchemaException(f"unknown media kind {kind!r}", element="media")
    return MediaRef(
        id=_attr(root, "id"),
        kind=MediaKind(kind),
        article_id=_get_text(root, "article-id"),
        byte_size=_get_int(root, "byte-size"),
        internal_comment=_get_text(root, "internal-comment"),
        payload_digest=_get_text(root, "payload-digest"),
        transcript=_get_text(root, "transcript"),
    )


def _decode_dateinfo(root: ET.Element) -> DateInfo:
    return DateInfo(
        date=_get_date(root, "date"),
        day_of_year=_get_int(root, "day-of-year"),
        weekday=_get_int(root, "weekday"),
    )


def _decode_metadata(root: ET.Element) -> MetadataRecord:
    kind = _attr(root, "kind")
    if kind not in {k.value for k in DocumentKind}:
        raise SchemaException(f"unknown document kind {kind!r}", element="metadata-record")
    frequencies = {
        _attr(term, "word"): int(_attr(term, "tf")) for term in _child(root, "term-frequencies").findall("term")
    }
    vector = {
        _attr(term, "word"): _get_float(_attr(term, "weight"), "tfidf-vector")
        for term in _child(root, "tfidf-vector").findall("term")
    }
    distribution = {
        int(_attr(topic, "index")): _get_float(topic.text or "", "topic-distribution")
        for topic in _child(root, "topic-distribution").findall("topic")
    }
    return MetadataRecord(
        document_id=_attr(root, "document-id"),
        article_id=_attr(root, "article-id"),
        kind=DocumentKind(kind),
        pagerank_score=_get_float(_get_text(root, "pagerank-score"), "pagerank-score"),
        term_frequencies=frequencies,
        tfidf_vector=vector,
        topic_distribution=distribution,
    )


_DECODERS: Dict[str, Callable[[ET.Element], Entity]] = {
    "article": _decode_article,
    "author": _decode_author,
    "topic": _decode_topic,
    "keyword": _decode_keyword,
    "language": _decode_language,
    "country": _decode_country,
    "media": _decode_media,
    "dateinfo": _decode_dateinfo,
    "metadata-record": _decode_metadata,
}


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _invariant_name(error: ValidationError) -> str:
    first = error.errors()[0]
    message = str(first.get("msg", ""))
    # validators name their invariant as "<entity>.<rule>: ..."
    if ": " in message:
        head = message.split(": ", 1)[0].replace("Value error, ", "")
        if "." in head and " " not in head:
            return head
    location = ".".join(str(part) for part in first.get("loc", ()))
    return f"field.{location or 'value'}"


def validate_entity(entity: Entity) -> None:
    """Re-check an entity's invariants.

    Entities built with ``model_construct`` bypass validation; this is where
    the serializer catches them.
    """
    try:
        type(entity).model_validate(entity.model_dump())
    except ValidationError as e:
        raise SerializationException(
            _invariant_name(e), entity_id=getattr(entity, "id", None), detail=str(e.errors()[0].get("msg"))
        ) from e


def serialize_entity(entity: Entity) -> bytes:
    """Encode an entity as a canonical XML document."""
    try:
        kind = entity_kind(entity)
    except TypeError as e:
        raise CodecException(str(e)) from e
    validate_entity(entity)
    root = _ENCODERS[kind](entity)
    ET.indent(root, space="  ")
    return (XML_HEADER + ET.tostring(root, encoding="unicode")).encode("utf-8")


def _byte_offset(data: bytes, position: Tuple[int, int]) -> int:
    line, column = position
    lines = data.split(b"\n")
    offset = sum(len(chunk) + 1 for chunk in lines[: max(line - 1, 0)])
    return min(offset + column, len(data))


def parse_entity(data: bytes) -> Entity:
    """Decode an XML document produced by :func:`serialize_entity`."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as e:
        raise XMLParseException(str(e).split(":")[0], _byte_offset(data, e.position)) from e

    decoder = _DECODERS.get(root.tag)
    if decoder is None:
        raise SchemaException(f"unknown root element <{root.tag}>")
    try:
        return decoder(root)
    except ValidationError as e:
        raise SchemaException(f"document violates {_invariant_name(e)}", element=root.tag) from e
    except ValueError as e:
        raise SchemaException(str(e), element=root.tag) from e


def write_entity_file(path: Path, entity: Entity) -> int:
    """Serialize ``entity`` to ``path``; returns the number of bytes written."""
    payload = serialize_entity(entity)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        raise CodecException(f"Cannot write {path}: {e}", path=str(path)) from e
    return len(payload)


def read_entity_file(path: Path) -> Entity:
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CodecException(f"Cannot read {path}: {e}", path=str(path)) from e
    return parse_entity(data)


# ---------------------------------------------------------------------------
# full-scan checks
# ---------------------------------------------------------------------------

def add_years(value: date, years: int) -> date:
    """Same calendar day ``years`` later; Feb 29 maps to Mar 1 in non-leap years."""
    try:
        return value.replace(year=value.year + years)
    except ValueError:
        return date(value.year + years, 3, 1)


def find_dangling_references(
    entities: Iterable[Entity], known_ids: Optional[Dict[str, Iterable[str]]] = None
) -> List[Tuple[str, str, str]]:
    """All (entity id, reference kind, missing id) triples over a set of entities.

    ``known_ids`` maps an entity kind to ids that resolve elsewhere, such as
    data loaded by earlier slices.
    """
    entities = list(entities)
    known: Dict[str, set] = defaultdict(set)
    for kind, ids in (known_ids or {}).items():
        known[kind].update(ids)
    for entity in entities:
        if not isinstance(entity, DateInfo):
            known[entity_kind(entity)].add(entity.id)

    dangling: List[Tuple[str, str, str]] = []

    def check(owner: str, kind: str, ref: str) -> None:
        if ref not in known[kind]:
            dangling.append((owner, kind, ref))

    for entity in entities:
        if isinstance(entity, Article):
            check(entity.id, "author", entity.author_id)
            check(entity.id, "language", entity.language_id)
            check(entity.id, "country", entity.country_id)
            for ref in entity.topic_ids:
                check(entity.id, "topic", ref)
            for ref in entity.keyword_ids:
                check(entity.id, "keyword", ref)
            for ref in entity.media_ids:
                check(entity.id, "media", ref)
            for ref in set(entity.citations):
                check(entity.id, "article", ref)
        elif isinstance(entity, Author):
            check(entity.id, "country", entity.citizenship_country_id)
            check(entity.id, "country", entity.work_country_id)
            if isinstance(entity, Professional):
                check(entity.id, "topic", entity.specialty_topic_id)
        elif isinstance(entity, MediaRef):
            check(entity.id, "article", entity.article_id)
        elif isinstance(entity, MetadataRecord):
            check(entity.document_id, "article", entity.article_id)
    return dangling


def check_referential_closure(
    entities: Iterable[Entity], known_ids: Optional[Dict[str, Iterable[str]]] = None
) -> None:
    """Raise on the first id that does not resolve within ``entities`` (or ``known_ids``)."""
    dangling = find_dangling_references(entities, known_ids)
    if dangling:
        owner, kind, missing = dangling[0]
        logger.warning("Referential closure failed: %d dangling references", len(dangling))
        raise DanglingReferenceException(owner, kind, missing)


def find_invariant_violations(entities: Iterable[Entity], window: Optional[Tuple[date, date]] = None) -> List[str]:
    """Cross-entity invariants a single entity cannot check on its own.

    Covers label uniqueness per reference class, the minimum author age at
    publication and, when ``window`` is given, publish dates inside it.
    """
    entities = list(entities)
    problems: List[str] = []

    labels = {
        "topic": Counter(e.label for e in entities if isinstance(e, Topic)),
        "keyword": Counter(e.word for e in entities if isinstance(e, Keyword)),
        "country": Counter(e.name for e in entities if isinstance(e, Country)),
        "language": Counter((e.code, e.dialect) for e in entities if isinstance(e, Language)),
    }
    for kind, counts in labels.items():
        for label, count in counts.items():
            if count > 1:
                problems.append(f"{kind}.unique_label: {label!r} used {count} times")

    authors = {e.id: e for e in entities if isinstance(e, Author)}
    for article in (e for e in entities if isinstance(e, Article)):
        author = authors.get(article.author_id)
        if author is not None and article.publish_date < add_years(author.birth_date, MIN_AUTHOR_AGE_YEARS):
            problems.append(
                f"author.min_age: {article.id} published before {author.id} was {MIN_AUTHOR_AGE_YEARS}"
            )
        if window and not window[0] <= article.publish_date <= window[1]:
            problems.append(f"article.publish_window: {article.id} dated {article.publish_date}")
    return problems
