"""Corpus directory persistence.

Layout::

    manifest.json
    shared/topics/<id>.xml   shared/keywords/<id>.xml
    shared/languages/<id>.xml   shared/countries/<id>.xml
    authors/<id>.xml
    articles/<id>.xml
    media/<id>.xml   media/<id>.bin
"""

import json
from pathlib import Path
from typing import List, Union

from pydantic import ValidationError

from ..corpus.exceptions import CodecException
from ..corpus.models import Article, Author, Country, Entity, Keyword, Language, MediaRef, Topic
from ..corpus.xml_codec import read_entity_file, write_entity_file
from ..logging_config import get_logger, log_performance
from .dataset import CorpusUnit, GeneratedCorpus
from .exceptions import CorpusStoreException
from .models import CorpusManifest

logger = get_logger(__name__)

MANIFEST_FILE = "manifest.json"

_SHARED_DIRS = (("topics", Topic), ("keywords", Keyword), ("languages", Language), ("countries", Country))


def _shared_dir(entity: Entity) -> str:
    for name, cls in _SHARED_DIRS:
        if isinstance(entity, cls):
            return name
    raise CorpusStoreException(f"not a shared entity: {type(entity).__name__}")


def write_corpus(corpus: GeneratedCorpus, out_dir: Union[str, Path]) -> Path:
    """Write every entity, payload and the manifest under ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        marker = out / ".write-check"
        marker.write_bytes(b"")
        marker.unlink()
    except OSError as e:
        raise CorpusStoreException(f"output directory is not writable: {e}", path=str(out)) from e

    with log_performance("write_corpus", logger):
        try:
            for entity in corpus.shared:
                write_entity_file(out / "shared" / _shared_dir(entity) / f"{entity.id}.xml", entity)
            for unit in corpus.units:
                for author in unit.authors:
                    write_entity_file(out / "authors" / f"{author.id}.xml", author)
                write_entity_file(out / "articles" / f"{unit.article.id}.xml", unit.article)
                for media, payload in unit.media:
                    write_entity_file(out / "media" / f"{media.id}.xml", media)
                    (out / "media" / f"{media.id}.bin").write_bytes(payload)
            (out / MANIFEST_FILE).write_text(corpus.manifest.to_json(), encoding="utf-8")
        except (OSError, CodecException) as e:
            raise CorpusStoreException(f"failed writing corpus: {e}", path=str(out)) from e

    logger.info("Wrote corpus with %d articles to %s", corpus.article_count, out)
    return out


def open_corpus(directory: Union[str, Path]) -> GeneratedCorpus:
    """Reopen a corpus written by :func:`write_corpus`."""
    root = Path(directory)
    manifest_path = root / MANIFEST_FILE
    try:
        manifest = CorpusManifest.model_validate(json.loads(manifest_path.read_text(encoding="utf-8")))
    except FileNotFoundError as e:
        raise CorpusStoreException("no corpus manifest found", path=str(manifest_path)) from e
    except (json.JSONDecodeError, ValidationError) as e:
        raise CorpusStoreException(f"corrupt corpus manifest: {e}", path=str(manifest_path)) from e

    with log_performance("open_corpus", logger):
        shared: List[Entity] = []
        for name, _ in _SHARED_DIRS:
            for path in sorted((root / "shared" / name).glob("*.xml")):
                shared.append(read_entity_file(path))

        units = []
        for entry in manifest.units:
            article = read_entity_file(root / "articles" / f"{entry.article_id}.xml")
            authors = tuple(read_entity_file(root / "authors" / f"{aid}.xml") for aid in entry.author_ids)
            media = []
            for media_id in entry.media_ids:
                ref = read_entity_file(root / "media" / f"{media_id}.xml")
                payload = (root / "media" / f"{media_id}.bin").read_bytes()
                media.append((ref, payload))
            if not isinstance(article, Article) or not all(isinstance(a, Author) for a in authors) \
                    or not all(isinstance(m, MediaRef) for m, _ in media):
                raise CorpusStoreException(f"unexpected entity kind in unit {entry.index}", path=str(root))
            units.append(CorpusUnit(
                index=entry.index,
                article=article,
                media=tuple(media),
                authors=authors,
                byte_size=entry.byte_size,
            ))

    logger.info("Opened corpus %s: %d articles", root, len(units))
    return GeneratedCorpus(manifest, shared, units)
