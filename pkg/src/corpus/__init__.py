"""News-hub corpus entities and their canonical XML encoding."""

from .models import Article, Author, Journalist, MediaRef, MetadataRecord, Professional
from .xml_codec import check_referential_closure, parse_entity, serialize_entity

__all__ = [
    "Article",
    "Author",
    "Journalist",
    "MediaRef",
    "MetadataRecord",
    "Professional",
    "check_referential_closure",
    "parse_entity",
    "serialize_entity",
]
