"""Synthetic Zipf-distributed vocabulary with per-topic bands."""

from typing import Dict, List

import numpy as np

from .exceptions import GeneratorConfigException
from .models import GeneratorConfig

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"
_SYLLABLES = [c + v for c in _CONSONANTS for v in _VOWELS]

# Words below this rank are general language shared by every topic.
GENERAL_RANKS = 100

SEARCH_WORDS = ("obama", "star", "trek", "higgs", "cleopatra")


def syllable_word(index: int) -> str:
    """Unique pronounceable word for a vocabulary index (at least two syllables).

    Generated words always end in a vowel, so they never collide with search words.
    """
    base = len(_SYLLABLES)
    value = index + base
    parts = []
    while value:
        value, digit = divmod(value, base)
        parts.append(_SYLLABLES[digit])
    return "".join(reversed(parts))


def search_word_ranks(vocabulary_size: int) -> Dict[str, int]:
    """Fixed positions of the full-text search words: one famous, two normal, two strange."""
    normal = vocabulary_size // 20
    return {
        "obama": 7,
        "star": normal,
        "trek": normal + 1,
        "higgs": vocabulary_size - 41,
        "cleopatra": vocabulary_size - 23,
    }


class Vocabulary:
    """Rank-ordered word list with global and per-topic Zipf samplers."""

    def __init__(self, config: GeneratorConfig):
        size = config.vocabulary_size
        band_size = (size - GENERAL_RANKS) // config.topics_total
        if band_size < config.keywords_per_topic + 5:
            raise GeneratorConfigException(
                f"vocabulary of {size} words is too small for {config.topics_total} topic bands",
                field="vocabulary_size",
            )
        self.size = size
        self.topics_total = config.topics_total
        self.exponent = config.zipf_exponent

        self.words: List[str] = [syllable_word(i) for i in range(size)]
        for word, rank in search_word_ranks(size).items():
            self.words[rank] = word
        self.rank_of: Dict[str, int] = {word: rank for rank, word in enumerate(self.words)}

        self.global_cdf = self._zipf_cdf(size)
        self.bands: List[np.ndarray] = [
            np.arange(GENERAL_RANKS + t, size, config.topics_total, dtype=np.int64) for t in range(self.topics_total)
        ]
        self.band_cdfs = [self._zipf_cdf(len(band)) for band in self.bands]

    def _zipf_cdf(self, n: int) -> np.ndarray:
        weights = 1.0 / np.power(np.arange(1, n + 1, dtype=np.float64), self.exponent)
        cdf = np.cumsum(weights)
        return cdf / cdf[-1]

    def zipf_probabilities(self) -> np.ndarray:
        """Theoretical global rank distribution."""
        return np.diff(np.concatenate(([0.0], self.global_cdf)))

    def sample_global(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.searchsorted(self.global_cdf, rng.random(n), side="right")

    def sample_band(self, rng: np.random.Generator, topic_index: int, n: int) -> np.ndarray:
        positions = np.searchsorted(self.band_cdfs[topic_index], rng.random(n), side="right")
        return self.bands[topic_index][positions]

    def sample_text(
        self, rng: np.random.Generator, topic_indices: List[int], n: int, topic_mix: float
    ) -> List[str]:
        """``n`` tokens; a ``topic_mix`` share comes from the given topics' bands."""
        from_topic = rng.random(n) < topic_mix
        ranks = self.sample_global(rng, n)
        topic_count = int(from_topic.sum())
        if topic_count and topic_indices:
            owners = rng.integers(0, len(topic_indices), size=topic_count)
            band_ranks = np.empty(topic_count, dtype=np.int64)
            for slot, topic_index in enumerate(topic_indices):
                mask = owners == slot
                band_ranks[mask] = self.sample_band(rng, topic_index, int(mask.sum()))
            ranks[from_topic] = band_ranks
        return [self.words[r] for r in ranks]

    def keyword_word(self, topic_index: int, position: int) -> str:
        return self.words[self.bands[topic_index][position]]
