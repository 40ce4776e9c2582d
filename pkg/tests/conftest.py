"""Shared fixtures: one small seeded corpus, a loaded cluster and its metadata."""

from datetime import date

import pytest

from src.backend.cluster import SimulatedCluster
from src.backend.models import ClusterConfig
from src.corpus.models import Article, Country, Journalist, Keyword, Language, Professional, Topic
from src.generator.corpus_generator import generate_corpus
from src.generator.models import GeneratorConfig
from src.generator.slicing import take_slice
from src.metadata.pipeline import MetadataPipeline, PipelineConfig, install

EVENT_DAY = date(2001, 9, 12)
LATER_EVENT_DAY = date(2008, 11, 5)


def small_generator_config(**overrides) -> GeneratorConfig:
    """Nine-year window, a low daily rate and heavy event days so both event dates carry articles."""
    values = dict(
        seed=7,
        scale_factor_gb=0.0005,
        start_date=date(2001, 1, 1),
        end_date=date(2009, 12, 31),
        articles_per_day=0.01,
        event_weight=1500.0,
        body_tokens_min=80,
        body_tokens_max=160,
    )
    values.update(overrides)
    return GeneratorConfig(**values)


FAST_PIPELINE = PipelineConfig(topic_count=4, gibbs_iterations=10, max_tokens_per_document=32)


@pytest.fixture(scope="session")
def generator_config():
    return small_generator_config()


@pytest.fixture(scope="session")
def corpus(generator_config):
    return generate_corpus(generator_config)


@pytest.fixture(scope="session")
def pipeline_config():
    return FAST_PIPELINE


@pytest.fixture
def loaded_cluster(corpus, pipeline_config):
    """Five-node strong cluster holding the whole corpus with metadata installed."""
    cluster = SimulatedCluster(ClusterConfig(nodes=5, replication_factor=3, seed=7))
    cluster.bulk_load(take_slice(corpus, 0.0, 1.0))
    store = MetadataPipeline(pipeline_config).build(cluster)
    install(cluster, store)
    return cluster


@pytest.fixture
def make_article():
    def _make(article_id="art-00000001", **fields) -> Article:
        values = dict(
            title="Harbour strike ends",
            body="dock workers return after talks",
            author_id="aut-00001",
            language_id="lang-00",
            country_id="cty-000",
            publish_date=date(2001, 9, 12),
        )
        values.update(fields)
        return Article(id=article_id, **values)

    return _make


@pytest.fixture
def reference_entities():
    """Minimal closed set of reference entities for a hand-built article."""
    return [
        Topic(id="top-000", label="politics"),
        Keyword(id="kw-00000", word="harbour"),
        Language(id="lang-00", code="en", dialect="GB"),
        Country(id="cty-000", name="Portugal", iso_code="PT"),
        Journalist(
            id="aut-00001",
            name="Ana Costa",
            birth_date=date(1960, 4, 2),
            citizenship_country_id="cty-000",
            work_country_id="cty-000",
            employer_journal="Daily Ledger",
        ),
        Professional(
            id="aut-00002",
            name="Rui Lopes",
            birth_date=date(1955, 1, 30),
            citizenship_country_id="cty-000",
            work_country_id="cty-000",
            specialty_topic_id="top-000",
        ),
    ]
