"""Tests for corpus generation, slicing and the on-disk corpus layout."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from src.corpus.models import Article, Journalist, Professional
from src.corpus.xml_codec import find_dangling_references, find_invariant_violations, serialize_entity
from src.generator.corpus_generator import CorpusGenerator, generate_corpus
from src.generator.corpus_store import open_corpus, write_corpus
from src.generator.exceptions import CorpusStoreException, GeneratorConfigException, NoExtraDataException, SliceRangeException
from src.generator.models import GeneratorConfig
from src.generator.slicing import next_slice, take_slice
from src.generator.vocabulary import GENERAL_RANKS, SEARCH_WORDS, Vocabulary, search_word_ranks

from .conftest import EVENT_DAY, LATER_EVENT_DAY, small_generator_config


class TestGeneratorConfig:
    """Validation of generator knobs."""

    def test_window_must_be_ordered(self, generator_config):
        with pytest.raises(ValidationError):
            GeneratorConfig(start_date=generator_config.end_date, end_date=generator_config.start_date)

    def test_body_bounds_must_be_ordered(self):
        with pytest.raises(ValidationError):
            GeneratorConfig(body_tokens_min=500, body_tokens_max=100)

    def test_tiny_scale_factor_cannot_hold_an_article(self):
        with pytest.raises(GeneratorConfigException) as exc_info:
            generate_corpus(small_generator_config(scale_factor_gb=1e-6))

        assert exc_info.value.exit_code == 3


class TestGeneratedCorpus:
    """Properties of a generated corpus."""

    def test_same_config_gives_identical_corpus(self, corpus, generator_config):
        again = generate_corpus(generator_config)

        assert again.manifest.corpus_digest == corpus.manifest.corpus_digest
        assert again.manifest.digest() == corpus.manifest.digest()

    def test_seed_changes_the_corpus(self, corpus):
        other = generate_corpus(small_generator_config(seed=8))

        assert other.manifest.corpus_digest != corpus.manifest.corpus_digest

    def test_size_tracks_scale_factor(self, corpus, generator_config):
        target = generator_config.target_bytes
        largest_unit = max(entry.byte_size for entry in corpus.manifest.units)

        assert abs(corpus.manifest.total_bytes - target) <= largest_unit

    def test_articles_are_in_publish_order_within_window(self, corpus, generator_config):
        dates = [a.publish_date for a in corpus.articles()]

        assert dates == sorted(dates)
        assert generator_config.start_date <= dates[0]
        assert dates[-1] <= generator_config.end_date

    def test_event_days_carry_extra_volume(self, corpus):
        on_event = [a for a in corpus.articles() if a.publish_date == EVENT_DAY]
        on_later_event = [a for a in corpus.articles() if a.publish_date == LATER_EVENT_DAY]

        assert len(on_event) >= 2
        assert len(on_later_event) >= 2

    def test_corpus_is_referentially_closed(self, corpus):
        assert find_dangling_references(corpus.all_entities()) == []

    def test_corpus_satisfies_cross_entity_invariants(self, corpus, generator_config):
        window = (generator_config.start_date, generator_config.end_date)

        assert find_invariant_violations(corpus.all_entities(), window) == []

    def test_both_author_subtypes_appear(self, corpus):
        kinds = {type(a) for a in corpus.authors()}

        assert kinds == {Journalist, Professional}

    def test_citations_point_backwards(self, corpus):
        for article in corpus.articles():
            assert all(cited < article.id for cited in article.citations)

    def test_manifest_counts_match_units(self, corpus):
        manifest = corpus.manifest

        assert manifest.article_count == len(corpus.units)
        assert manifest.per_entity_counts["article"] == manifest.article_count
        assert manifest.per_entity_counts["author"] == sum(1 for _ in corpus.authors())
        assert sum(b.byte_size for b in manifest.slice_boundaries) == manifest.total_bytes

    def test_synthesized_articles_use_insert_ids(self, corpus):
        generator = CorpusGenerator(corpus.config)
        author = next(corpus.authors())
        article = generator.synthesize_article(3, author, EVENT_DAY)

        assert isinstance(article, Article)
        assert article.id == "ins-00000003"
        assert article.author_id == author.id
        assert generator.synthesize_article(3, author, EVENT_DAY) == article


class TestPrefixStability:
    """A larger scale factor extends the corpus without rewriting it."""

    @pytest.fixture(scope="class")
    def larger(self):
        return generate_corpus(small_generator_config(scale_factor_gb=0.001))

    @staticmethod
    def unit_bytes(unit) -> bytes:
        parts = [serialize_entity(a) for a in unit.authors]
        parts.append(serialize_entity(unit.article))
        for media, payload in unit.media:
            parts.extend([serialize_entity(media), payload])
        return b"".join(parts)

    def test_smaller_corpus_is_a_byte_prefix(self, corpus, larger):
        assert larger.article_count > corpus.article_count
        for unit, extended in zip(corpus.units, larger.units):
            assert self.unit_bytes(unit) == self.unit_bytes(extended), unit.article.id

    def test_manifest_entries_are_a_prefix(self, corpus, larger):
        count = corpus.article_count

        assert larger.manifest.units[:count] == corpus.manifest.units
        assert list(larger.shared) == list(corpus.shared)

    def test_default_rate_does_not_follow_scale_factor(self):
        small = CorpusGenerator(GeneratorConfig(scale_factor_gb=0.01))
        large = CorpusGenerator(GeneratorConfig(scale_factor_gb=0.02))

        assert small.articles_per_day == large.articles_per_day
        assert [small.day_of(i) for i in range(0, 3000, 97)] == [large.day_of(i) for i in range(0, 3000, 97)]

    def test_overflow_lands_on_the_last_day(self):
        config = small_generator_config(scale_factor_gb=0.001, articles_per_day=0.001, event_weight=1.0)
        overflowing = generate_corpus(config)
        generator = CorpusGenerator(config)
        dates = [a.publish_date for a in overflowing.articles()]

        assert overflowing.article_count > generator.window_capacity
        assert dates == sorted(dates)
        assert dates[-1] == config.end_date


class TestSlicing:
    """Fraction slices over the unit stream."""

    def test_adjacent_slices_tile_the_corpus(self, corpus):
        first = take_slice(corpus, 0.0, 0.5)
        second = take_slice(corpus, 0.5, 1.0)

        assert not set(first.article_ids) & set(second.article_ids)
        assert first.article_ids + second.article_ids == [u.article.id for u in corpus.units]
        assert first.byte_size + second.byte_size == corpus.manifest.total_bytes

    def test_only_first_slice_carries_shared_pools(self, corpus):
        first = take_slice(corpus, 0.0, 0.5)
        second = take_slice(corpus, 0.5, 1.0)
        first_kinds = {type(e).__name__ for e in first.entities()}
        second_kinds = {type(e).__name__ for e in second.entities()}

        assert "Topic" in first_kinds
        assert "Topic" not in second_kinds

    def test_slice_entities_close_over_earlier_slices(self, corpus):
        first = list(take_slice(corpus, 0.0, 0.5).entities())
        both = first + list(take_slice(corpus, 0.5, 1.0).entities())

        assert find_dangling_references(first) == []
        assert find_dangling_references(both) == []

    @pytest.mark.parametrize("bounds", [(0.5, 0.5), (-0.1, 0.5), (0.2, 1.2)])
    def test_bad_ranges_are_rejected(self, corpus, bounds):
        with pytest.raises(SliceRangeException):
            take_slice(corpus, *bounds)

    def test_next_slice_follows_loaded_part(self, corpus):
        following = next_slice(corpus, 0.5, 0.5)

        assert following.article_ids == take_slice(corpus, 0.5, 1.0).article_ids

    def test_zero_delta_is_empty(self, corpus):
        assert next_slice(corpus, 0.5, 0.0).is_empty

    def test_no_extra_data_past_the_end(self, corpus):
        with pytest.raises(NoExtraDataException):
            next_slice(corpus, 1.0, 0.1)
        with pytest.raises(NoExtraDataException):
            next_slice(corpus, 0.6, 0.5)


class TestCorpusStore:
    """Writing and reopening a corpus directory."""

    def test_reopened_corpus_matches(self, corpus, tmp_path):
        write_corpus(corpus, tmp_path / "corpus")
        reopened = open_corpus(tmp_path / "corpus")

        assert reopened.manifest == corpus.manifest
        assert list(reopened.articles()) == list(corpus.articles())
        assert list(reopened.shared) == list(corpus.shared)
        for unit, original in zip(reopened.units, corpus.units):
            assert [payload for _, payload in unit.media] == [payload for _, payload in original.media]

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(CorpusStoreException) as exc_info:
            open_corpus(tmp_path)

        assert "manifest" in str(exc_info.value)


class TestVocabulary:
    """Zipf sampling and planted search words."""

    @pytest.fixture(scope="class")
    def vocabulary(self):
        return Vocabulary(GeneratorConfig(vocabulary_size=2000))

    def test_search_words_sit_at_fixed_ranks(self, vocabulary):
        for word, rank in search_word_ranks(2000).items():
            assert vocabulary.words[rank] == word
        assert len(set(vocabulary.words)) == len(vocabulary.words)
        assert set(SEARCH_WORDS) <= set(vocabulary.rank_of)

    def test_global_sampler_fits_zipf(self, vocabulary):
        samples = vocabulary.sample_global(np.random.default_rng(0), 50_000)
        probabilities = vocabulary.zipf_probabilities()
        head = 20

        counts = np.bincount(samples, minlength=vocabulary.size)
        observed = np.append(counts[:head], counts[head:].sum())
        expected = np.append(probabilities[:head], probabilities[head:].sum()) * len(samples)

        assert stats.chisquare(observed, expected).pvalue > 0.001

    def test_article_bodies_follow_the_global_zipf(self):
        config = small_generator_config(topic_mix=0.0)
        vocabulary = Vocabulary(config)
        bodies = [article.body for article in generate_corpus(config).articles()]
        ranks = [vocabulary.rank_of[token] for body in bodies for token in body.split()]

        empirical = np.cumsum(np.bincount(ranks, minlength=vocabulary.size)) / len(ranks)
        distance = np.max(np.abs(empirical - vocabulary.global_cdf))

        assert len(ranks) > 2000
        assert distance <= 0.05

    def test_topic_tokens_come_from_the_band(self, vocabulary):
        tokens = vocabulary.sample_text(np.random.default_rng(1), [3], 200, topic_mix=1.0)

        band = {vocabulary.words[r] for r in vocabulary.bands[3]}
        assert set(tokens) <= band
        assert all(vocabulary.rank_of[t] >= GENERAL_RANKS for t in tokens)

    def test_too_small_for_topic_bands(self):
        with pytest.raises(GeneratorConfigException):
            Vocabulary(GeneratorConfig(vocabulary_size=500, topics_total=40))
