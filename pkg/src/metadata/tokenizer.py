"""Document extraction and tokenization.

Tokens are lower-cased runs of ASCII letters and digits; tokens shorter than
two characters are dropped. No stemming.
"""

import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, NamedTuple, Sequence

from ..corpus.models import Article, DocumentKind, MediaRef

TOKEN_PATTERN = re.compile(r"[a-z0-9]+")
MIN_TOKEN_LENGTH = 2


class Document(NamedTuple):
    """One indexable text: an article (title and body) or a media transcript."""

    document_id: str
    article_id: str
    kind: DocumentKind
    version: int
    text: str


def tokenize(text: str) -> List[str]:
    return [t for t in TOKEN_PATTERN.findall(text.lower()) if len(t) >= MIN_TOKEN_LENGTH]


def article_document(article: Article) -> Document:
    return Document(article.id, article.id, DocumentKind.ARTICLE, article.version, f"{article.title}\n{article.body}")


def transcript_document(media: MediaRef) -> Document:
    return Document(media.id, media.article_id, DocumentKind.TRANSCRIPT, 1, media.transcript)


def collect_documents(articles: Iterable[Article], media: Iterable[MediaRef]) -> List[Document]:
    """Article and transcript documents, in document-id order.

    Transcripts whose article is not among ``articles`` are skipped.
    """
    documents = {}
    for article in articles:
        documents[article.id] = article_document(article)
    live = set(documents)
    for ref in media:
        if ref.article_id in live:
            documents[ref.id] = transcript_document(ref)
    return [documents[key] for key in sorted(documents)]


def tokenize_documents(documents: Sequence[Document], workers: int = 1) -> Dict[str, List[str]]:
    """Token lists per document id, merged in document-id order whatever the worker count."""
    ordered = sorted(documents, key=lambda d: d.document_id)
    if workers > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="tokenize") as pool:
            token_lists = list(pool.map(lambda d: tokenize(d.text), ordered))
    else:
        token_lists = [tokenize(d.text) for d in ordered]
    return {doc.document_id: tokens for doc, tokens in zip(ordered, token_lists)}


def term_frequencies(tokens: Iterable[str]) -> Dict[str, int]:
    return dict(sorted(Counter(tokens).items()))
