"""Inverted index with TF-IDF weights.

``weight(t, d) = tf(t, d) * ln(N / df(t))`` where N counts every indexed
document (articles and transcripts).
"""

import math
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .tokenizer import tokenize

Posting = Tuple[str, int]


class InvertedIndex:
    """Term to postings map; postings are ``(document_id, tf)`` in document-id order."""

    def __init__(self):
        self.postings: Dict[str, List[Posting]] = {}
        self.term_frequencies: Dict[str, Dict[str, int]] = {}
        self._idf: Dict[str, float] = {}

    # -- construction ---------------------------------------------------------------

    @classmethod
    def build(cls, term_frequencies: Mapping[str, Mapping[str, int]]) -> "InvertedIndex":
        index = cls()
        for document_id in sorted(term_frequencies):
            tfs = {term: tf for term, tf in sorted(term_frequencies[document_id].items()) if tf > 0}
            index.term_frequencies[document_id] = tfs
            for term, tf in tfs.items():
                index.postings.setdefault(term, []).append((document_id, tf))
        index.postings = dict(sorted(index.postings.items()))
        n = index.document_count
        index._idf = {term: math.log(n / len(plist)) for term, plist in index.postings.items()}
        return index

    # -- statistics -----------------------------------------------------------------

    @property
    def document_count(self) -> int:
        return len(self.term_frequencies)

    def document_frequency(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def idf(self, term: str) -> float:
        return self._idf.get(term, 0.0)

    def weight(self, term: str, document_id: str) -> float:
        tf = self.term_frequencies.get(document_id, {}).get(term, 0)
        return tf * self.idf(term) if tf else 0.0

    def tfidf_vector(self, document_id: str) -> Dict[str, float]:
        return {term: tf * self._idf[term] for term, tf in self.term_frequencies.get(document_id, {}).items()}

    def documents(self) -> Iterator[str]:
        return iter(self.term_frequencies)

    def __contains__(self, document_id: str) -> bool:
        return document_id in self.term_frequencies

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return self.postings == other.postings and self.term_frequencies == other.term_frequencies

    def __repr__(self) -> str:
        return f"InvertedIndex(documents={self.document_count}, terms={len(self.postings)})"

    # -- retrieval ------------------------------------------------------------------

    def matching_documents(self, terms: Sequence[str]) -> Dict[str, float]:
        """Documents containing at least one query term, scored by summed weight."""
        scores: Dict[str, float] = {}
        for term in _query_terms(terms):
            idf = self.idf(term)
            for document_id, tf in self.postings.get(term, ()):
                scores[document_id] = scores.get(document_id, 0.0) + tf * idf
        return scores

    def rank(self, terms: Sequence[str], limit: Optional[int] = None) -> List[Tuple[str, float]]:
        ranked = sorted(self.matching_documents(terms).items(), key=lambda item: (-item[1], item[0]))
        return ranked if limit is None else ranked[:limit]


def _query_terms(terms: Sequence[str]) -> List[str]:
    seen: Dict[str, None] = {}
    for raw in terms:
        for token in tokenize(raw):
            seen.setdefault(token, None)
    return list(seen)


def build_tfidf(term_frequencies: Mapping[str, Mapping[str, int]]) -> InvertedIndex:
    return InvertedIndex.build(term_frequencies)
