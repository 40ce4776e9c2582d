"""LDA topic extraction by collapsed Gibbs sampling.

Tokens of all documents are laid out in one flat stream (documents in id
order). The default sequential sampler resamples one token at a time and
updates the count matrices after every draw. The batched sampler, an explicit
opt-in for large corpora, resamples every document's token at the same
position together; document counts stay exact but topic-word counts are
shared within one position batch.
"""

from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..logging_config import get_logger, log_performance
from .exceptions import MetadataArgumentException

logger = get_logger(__name__)

DEFAULT_TOPIC_COUNT = 8
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 200
DEFAULT_MAX_TOKENS_PER_DOCUMENT = 128


class GibbsSampler(str, Enum):
    SEQUENTIAL = "sequential"
    BATCHED = "batched"


def default_alpha(topic_count: int) -> float:
    return 50.0 / topic_count


class TopicModelState:
    """Fitted model: per-document theta rows and per-topic phi rows."""

    def __init__(
        self,
        document_ids: List[str],
        vocabulary: List[str],
        theta: np.ndarray,
        phi: np.ndarray,
        alpha: float,
        beta: float,
        seed: int,
        iterations: int,
        sampler: GibbsSampler = GibbsSampler.SEQUENTIAL,
    ):
        self.document_ids = document_ids
        self.vocabulary = vocabulary
        self.theta = theta
        self.phi = phi
        self.alpha = alpha
        self.beta = beta
        self.seed = seed
        self.iterations = iterations
        self.sampler = sampler
        self._row = {doc: i for i, doc in enumerate(document_ids)}

    @property
    def topic_count(self) -> int:
        return self.phi.shape[0]

    def distribution(self, document_id: str) -> Dict[int, float]:
        row = self.theta[self._row[document_id]]
        return {k: float(p) for k, p in enumerate(row)}

    def dominant_topic(self, document_id: str) -> int:
        return int(np.argmax(self.theta[self._row[document_id]]))

    def top_words(self, topic: int, n: int = 10) -> List[str]:
        order = np.argsort(-self.phi[topic], kind="stable")[:n]
        return [self.vocabulary[i] for i in order]


class _Counts:
    """Assignment vector and the three count tables the conditional reads."""

    def __init__(self, words: np.ndarray, docs: np.ndarray, topics: np.ndarray, d: int, k: int, v: int):
        self.words = words
        self.docs = docs
        self.topics = topics
        self.doc_topic = np.zeros((d, k), dtype=np.int64)
        self.topic_word = np.zeros((k, v), dtype=np.int64)
        np.add.at(self.doc_topic, (docs, topics), 1)
        np.add.at(self.topic_word, (topics, words), 1)
        self.topic_total = self.topic_word.sum(axis=1)


def _sweep_sequential(counts: _Counts, draws: np.ndarray, alpha: float, beta: float, beta_total: float) -> None:
    words = counts.words.tolist()
    docs = counts.docs.tolist()
    topics = counts.topics
    doc_topic, topic_word, topic_total = counts.doc_topic, counts.topic_word, counts.topic_total
    last = doc_topic.shape[1] - 1
    for n, (w, d) in enumerate(zip(words, docs)):
        old = topics[n]
        doc_topic[d, old] -= 1
        topic_word[old, w] -= 1
        topic_total[old] -= 1

        cumulative = np.cumsum((doc_topic[d] + alpha) * (topic_word[:, w] + beta) / (topic_total + beta_total))
        new = min(int(np.searchsorted(cumulative, draws[n] * cumulative[-1], side="right")), last)

        topics[n] = new
        doc_topic[d, new] += 1
        topic_word[new, w] += 1
        topic_total[new] += 1


def _sweep_batched(
    counts: _Counts, batches: List[np.ndarray], draws: np.ndarray, alpha: float, beta: float, beta_total: float
) -> None:
    last = counts.doc_topic.shape[1] - 1
    for batch in batches:
        rows = counts.docs[batch]
        w = counts.words[batch]
        old = counts.topics[batch]
        np.subtract.at(counts.doc_topic, (rows, old), 1)
        np.subtract.at(counts.topic_word, (old, w), 1)
        np.subtract.at(counts.topic_total, old, 1)

        weights = (counts.doc_topic[rows] + alpha) * (counts.topic_word[:, w].T + beta) / (
            counts.topic_total + beta_total
        )
        cumulative = np.cumsum(weights, axis=1)
        scaled = draws[batch] * cumulative[:, -1]
        new = np.minimum((cumulative <= scaled[:, None]).sum(axis=1), last)

        counts.topics[batch] = new
        np.add.at(counts.doc_topic, (rows, new), 1)
        np.add.at(counts.topic_word, (new, w), 1)
        np.add.at(counts.topic_total, new, 1)


def extract_topics(
    documents: Mapping[str, Sequence[str]],
    topic_count: int = DEFAULT_TOPIC_COUNT,
    alpha: Optional[float] = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 42,
    max_tokens_per_document: Optional[int] = DEFAULT_MAX_TOKENS_PER_DOCUMENT,
    sampler: GibbsSampler = GibbsSampler.SEQUENTIAL,
) -> TopicModelState:
    """Fit an LDA model to token lists keyed by document id.

    Only the first ``max_tokens_per_document`` tokens of each document enter
    the model; ``None`` keeps every token. The number of dropped tokens is
    logged.
    """
    if topic_count < 2:
        raise MetadataArgumentException("topic_count", topic_count, "needs at least 2 topics")
    if not documents:
        raise MetadataArgumentException("documents", 0, "topic extraction needs at least one document")
    if max_tokens_per_document is not None and max_tokens_per_document < 1:
        raise MetadataArgumentException("max_tokens_per_document", max_tokens_per_document, "must be at least 1")
    alpha = default_alpha(topic_count) if alpha is None else alpha
    if alpha <= 0 or beta <= 0:
        raise MetadataArgumentException("alpha/beta", (alpha, beta), "priors must be positive")
    sampler = GibbsSampler(sampler)

    document_ids = sorted(documents)
    kept = [list(documents[doc])[:max_tokens_per_document] for doc in document_ids]
    dropped = sum(len(documents[doc]) for doc in document_ids) - sum(len(tokens) for tokens in kept)
    if dropped:
        logger.info("Topic model keeps %d tokens per document; %d tokens left out", max_tokens_per_document, dropped)

    vocabulary = sorted({token for tokens in kept for token in tokens})
    v = len(vocabulary)
    if topic_count > v:
        raise MetadataArgumentException("topic_count", topic_count, f"exceeds vocabulary size {v}")
    word_index = {word: i for i, word in enumerate(vocabulary)}

    d = len(document_ids)
    words = np.array([word_index[t] for tokens in kept for t in tokens], dtype=np.int64)
    docs = np.repeat(np.arange(d, dtype=np.int64), [len(tokens) for tokens in kept])
    positions = np.concatenate([np.arange(len(tokens), dtype=np.int64) for tokens in kept])

    rng = np.random.default_rng([seed, 11])
    counts = _Counts(words, docs, rng.integers(0, topic_count, size=len(words)), d, topic_count, v)
    beta_total = v * beta
    batches = []
    if sampler is GibbsSampler.BATCHED and len(words):
        batches = [np.nonzero(positions == p)[0] for p in range(int(positions.max()) + 1)]

    with log_performance(f"lda_gibbs_{sampler.value}", logger):
        for _ in range(iterations):
            draws = rng.random(len(words))
            if sampler is GibbsSampler.SEQUENTIAL:
                _sweep_sequential(counts, draws, alpha, beta, beta_total)
            else:
                _sweep_batched(counts, batches, draws, alpha, beta, beta_total)

    doc_topic, topic_word = counts.doc_topic, counts.topic_word
    theta = (doc_topic + alpha) / (doc_topic.sum(axis=1, keepdims=True) + topic_count * alpha)
    phi = (topic_word + beta) / (topic_word.sum(axis=1, keepdims=True) + beta_total)
    theta = theta / theta.sum(axis=1, keepdims=True)
    phi = phi / phi.sum(axis=1, keepdims=True)
    logger.info(
        "Extracted %d topics from %d documents (%d terms, %s sampler)", topic_count, d, v, sampler.value
    )
    return TopicModelState(document_ids, vocabulary, theta, phi, alpha, beta, seed, iterations, sampler)
