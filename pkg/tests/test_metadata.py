"""Tests for tokenization, TF-IDF, PageRank, topic extraction and the metadata pipeline."""

import math

import numpy as np
import pytest

from src.backend.cluster import SimulatedCluster
from src.corpus.models import DocumentKind
from src.generator.slicing import next_slice, take_slice
from src.metadata.exceptions import MetadataArgumentException, PipelineStateException
from src.metadata.pagerank import CitationGraph, compute_pagerank
from src.metadata.pipeline import MetadataPipeline, PipelineConfig, load_metadata, persist_metadata
from src.metadata.tfidf import InvertedIndex
from src.metadata.tokenizer import tokenize
from src.metadata.topics import GibbsSampler, extract_topics


class TestTokenizer:
    def test_lowercases_and_drops_short_tokens(self):
        assert tokenize("Obama wins: a 2008 U.S. vote!") == ["obama", "wins", "2008", "vote"]

    def test_empty_text(self):
        assert tokenize("  ...  ") == []


class TestInvertedIndex:
    """TF-IDF weights over a tiny hand-built index."""

    @pytest.fixture
    def index(self):
        return InvertedIndex.build({
            "doc-1": {"harbour": 2, "strike": 1},
            "doc-2": {"harbour": 1, "election": 3},
            "doc-3": {"harbour": 1},
        })

    def test_idf_is_natural_log_of_inverse_frequency(self, index):
        assert index.idf("strike") == pytest.approx(math.log(3))
        assert index.idf("harbour") == 0.0
        assert index.idf("unknown") == 0.0

    def test_weights(self, index):
        assert index.weight("election", "doc-2") == pytest.approx(3 * math.log(3))
        assert index.tfidf_vector("doc-1") == {"harbour": 0.0, "strike": pytest.approx(math.log(3))}

    def test_postings_are_in_document_order(self, index):
        assert index.postings["harbour"] == [("doc-1", 2), ("doc-2", 1), ("doc-3", 1)]
        assert index.document_frequency("harbour") == 3

    def test_matching_sums_term_weights(self, index):
        scores = index.matching_documents(["Strike", "ELECTION"])

        assert set(scores) == {"doc-1", "doc-2"}
        assert scores["doc-2"] == pytest.approx(3 * math.log(3))

    def test_ranking_breaks_ties_by_id(self, index):
        assert [doc for doc, _ in index.rank(["harbour"])] == ["doc-1", "doc-2", "doc-3"]

    def test_five_documents_against_hand_computed_weights(self):
        counts = {
            "doc-1": {"port": 3, "crane": 1},
            "doc-2": {"port": 1, "ferry": 2},
            "doc-3": {"ferry": 1, "tide": 4},
            "doc-4": {"tide": 1},
            "doc-5": {"port": 2, "ferry": 1, "tide": 1},
        }
        index = InvertedIndex.build(counts)

        assert index.tfidf_vector("doc-1") == {
            "crane": pytest.approx(math.log(5)),
            "port": pytest.approx(3 * math.log(5 / 3)),
        }
        assert index.weight("tide", "doc-3") == pytest.approx(4 * math.log(5 / 3))
        assert index.weight("ferry", "doc-5") == pytest.approx(math.log(5 / 3))
        assert index.matching_documents(["crane", "ferry"])["doc-2"] == pytest.approx(2 * math.log(5 / 3))

    def test_random_corpus_matches_brute_force(self):
        rng = np.random.default_rng(17)
        vocabulary = [f"w{i:02d}" for i in range(60)]
        counts = {}
        for d in range(200):
            words = rng.choice(vocabulary, size=int(rng.integers(1, 30)))
            bag = {}
            for word in words:
                bag[str(word)] = bag.get(str(word), 0) + 1
            counts[f"doc-{d:03d}"] = bag
        index = InvertedIndex.build(counts)

        frequency = {}
        for bag in counts.values():
            for word in bag:
                frequency[word] = frequency.get(word, 0) + 1
        for doc, bag in counts.items():
            expected = {word: tf * math.log(200 / frequency[word]) for word, tf in bag.items()}
            vector = index.tfidf_vector(doc)
            assert vector.keys() == expected.keys()
            for word, weight in expected.items():
                assert vector[word] == pytest.approx(weight, abs=1e-12)


class TestPageRank:
    """Power iteration over small citation graphs."""

    def test_scores_form_a_distribution(self):
        graph = CitationGraph(["a", "b", "c", "d"], {("b", "a"): 1.0, ("c", "a"): 1.0, ("d", "a"): 2.0, ("a", "b"): 1.0})

        scores = compute_pagerank(graph)

        assert sum(scores.values()) == pytest.approx(1.0)
        assert max(scores, key=scores.get) == "a"
        assert scores["c"] == pytest.approx(scores["d"])

    def test_graph_without_edges_is_uniform(self):
        scores = compute_pagerank(CitationGraph(["a", "b", "c", "d"], {}))

        assert all(score == pytest.approx(0.25) for score in scores.values())

    def test_empty_graph(self):
        assert compute_pagerank(CitationGraph([], {})) == {}

    @pytest.mark.parametrize("damping", [0.0, 1.0, 1.5])
    def test_damping_must_be_open_unit_interval(self, damping):
        with pytest.raises(MetadataArgumentException) as exc_info:
            compute_pagerank(CitationGraph(["a"], {}), damping=damping)

        assert exc_info.value.exit_code == 2

    def test_from_articles_counts_multiplicity(self, make_article):
        cited = make_article("art-00000001")
        citing = make_article("art-00000002", citations=["art-00000001", "art-00000001", "art-00000404"])

        graph = CitationGraph.from_articles([cited, citing])

        assert graph.edges == {("art-00000002", "art-00000001"): 2.0}

    @staticmethod
    def dense_pagerank(nodes, edges, damping=0.85):
        position = {node: i for i, node in enumerate(nodes)}
        n = len(nodes)
        weights = np.zeros((n, n))
        for (source, target), weight in edges.items():
            weights[position[source], position[target]] += weight
        out = weights.sum(axis=1, keepdims=True)
        transition = np.where(out > 0, weights / np.where(out > 0, out, 1.0), 1.0 / n)
        google = damping * transition + (1.0 - damping) / n
        x = np.full(n, 1.0 / n)
        for _ in range(2000):
            x = x @ google
        return {node: float(x[position[node]]) for node in nodes}

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense_power_iteration(self, seed):
        rng = np.random.default_rng(seed)
        nodes = [f"n{i:02d}" for i in range(25)]
        edges = {}
        for _ in range(60):
            source, target = rng.choice(25, size=2, replace=False)
            # the last five nodes never cite anything
            if source < 20:
                key = (nodes[source], nodes[target])
                edges[key] = edges.get(key, 0.0) + float(rng.integers(1, 4))

        scores = compute_pagerank(CitationGraph(nodes, edges), tolerance=1e-13, max_iterations=2000)
        expected = self.dense_pagerank(nodes, edges)

        for node in nodes:
            assert scores[node] == pytest.approx(expected[node], abs=1e-6)

    def test_two_cycle_splits_evenly(self):
        scores = compute_pagerank(CitationGraph(["a", "b"], {("a", "b"): 1.0, ("b", "a"): 1.0}))

        assert scores["a"] == pytest.approx(0.5)
        assert scores["b"] == pytest.approx(0.5)

    def test_relabelling_nodes_moves_scores_with_them(self):
        edges = {("a", "b"): 1.0, ("b", "c"): 2.0, ("c", "a"): 1.0, ("d", "a"): 3.0, ("d", "c"): 1.0}
        rename = {"a": "z", "b": "y", "c": "x", "d": "w", "e": "v"}
        renamed = {(rename[s], rename[t]): w for (s, t), w in edges.items()}

        scores = compute_pagerank(CitationGraph(list(rename), edges))
        relabelled = compute_pagerank(CitationGraph(list(rename.values()), renamed))

        for old, new in rename.items():
            assert relabelled[new] == pytest.approx(scores[old], abs=1e-12)


class TestTopicExtraction:
    """Gibbs-sampled LDA."""

    @pytest.fixture
    def two_vocabularies(self):
        sports = ["goal", "match", "league", "striker", "keeper", "referee"]
        markets = ["stock", "bond", "yield", "equity", "broker", "dividend"]
        rng = np.random.default_rng(0)
        documents = {}
        for i in range(12):
            vocabulary = sports if i % 2 == 0 else markets
            documents[f"doc-{i:02d}"] = [vocabulary[j] for j in rng.integers(0, len(vocabulary), size=40)]
        return documents

    def test_disjoint_vocabularies_separate(self, two_vocabularies):
        model = extract_topics(two_vocabularies, topic_count=2, alpha=0.1, iterations=60, seed=3)

        even = {model.dominant_topic(f"doc-{i:02d}") for i in range(0, 12, 2)}
        odd = {model.dominant_topic(f"doc-{i:02d}") for i in range(1, 12, 2)}

        assert len(even) == 1
        assert len(odd) == 1
        assert even != odd

    def test_rows_are_distributions(self, two_vocabularies):
        model = extract_topics(two_vocabularies, topic_count=3, iterations=5)

        assert np.allclose(model.theta.sum(axis=1), 1.0)
        assert np.allclose(model.phi.sum(axis=1), 1.0)
        assert sum(model.distribution("doc-00").values()) == pytest.approx(1.0)

    def test_same_seed_same_model(self, two_vocabularies):
        first = extract_topics(two_vocabularies, topic_count=2, iterations=10, seed=5)
        second = extract_topics(two_vocabularies, topic_count=2, iterations=10, seed=5)

        assert np.array_equal(first.theta, second.theta)

    def test_token_cap_limits_vocabulary(self):
        model = extract_topics({"doc": ["aa", "bb", "cc", "dd"]}, topic_count=2, iterations=2, max_tokens_per_document=2)

        assert model.vocabulary == ["aa", "bb"]

    @staticmethod
    def reference_gibbs(documents, topic_count, alpha, beta, iterations, seed):
        """Token-at-a-time collapsed Gibbs written out with plain loops."""
        ids = sorted(documents)
        vocabulary = sorted({t for doc in ids for t in documents[doc]})
        index = {w: i for i, w in enumerate(vocabulary)}
        tokens = [(d, index[t]) for d, doc in enumerate(ids) for t in documents[doc]]
        rng = np.random.default_rng([seed, 11])
        topics = list(rng.integers(0, topic_count, size=len(tokens)))
        doc_topic = [[0] * topic_count for _ in ids]
        topic_word = [[0] * len(vocabulary) for _ in range(topic_count)]
        for (d, w), z in zip(tokens, topics):
            doc_topic[d][z] += 1
            topic_word[z][w] += 1
        beta_total = beta * len(vocabulary)
        for _ in range(iterations):
            draws = rng.random(len(tokens))
            for n, (d, w) in enumerate(tokens):
                z = topics[n]
                doc_topic[d][z] -= 1
                topic_word[z][w] -= 1
                weights = [
                    (doc_topic[d][k] + alpha) * (topic_word[k][w] + beta) / (sum(topic_word[k]) + beta_total)
                    for k in range(topic_count)
                ]
                target = draws[n] * sum(weights)
                acc, new = 0.0, topic_count - 1
                for k, weight in enumerate(weights):
                    acc += weight
                    if acc > target:
                        new = k
                        break
                topics[n] = new
                doc_topic[d][new] += 1
                topic_word[new][w] += 1
        theta = np.array([[(c + alpha) / (sum(row) + topic_count * alpha) for c in row] for row in doc_topic])
        return theta / theta.sum(axis=1, keepdims=True)

    def test_sequential_sampler_matches_token_by_token_reference(self, two_vocabularies):
        model = extract_topics(two_vocabularies, topic_count=3, alpha=0.5, iterations=4, seed=9, max_tokens_per_document=None)
        expected = self.reference_gibbs(two_vocabularies, 3, 0.5, 0.01, 4, 9)

        assert np.allclose(model.theta, expected)

    def test_sequential_is_the_default(self, two_vocabularies):
        model = extract_topics(two_vocabularies, topic_count=2, iterations=1)

        assert model.sampler is GibbsSampler.SEQUENTIAL
        assert PipelineConfig().gibbs_sampler is GibbsSampler.SEQUENTIAL

    def test_batched_sampler_is_an_explicit_choice(self, two_vocabularies):
        first = extract_topics(two_vocabularies, topic_count=2, iterations=10, seed=5, sampler="batched")
        second = extract_topics(two_vocabularies, topic_count=2, iterations=10, seed=5, sampler=GibbsSampler.BATCHED)
        sequential = extract_topics(two_vocabularies, topic_count=2, iterations=10, seed=5)

        assert first.sampler is GibbsSampler.BATCHED
        assert np.array_equal(first.theta, second.theta)
        assert np.allclose(first.theta.sum(axis=1), 1.0)
        assert not np.array_equal(first.theta, sequential.theta)

    def test_no_token_cap_keeps_every_token(self):
        document = [f"t{i:03d}" for i in range(300)]

        model = extract_topics({"doc": document}, topic_count=2, iterations=1, max_tokens_per_document=None)

        assert len(model.vocabulary) == 300

    @pytest.mark.parametrize(
        "kwargs",
        [{"topic_count": 1}, {"topic_count": 50}, {"beta": 0.0}, {"alpha": -1.0}],
    )
    def test_bad_parameters(self, two_vocabularies, kwargs):
        with pytest.raises(MetadataArgumentException):
            extract_topics(two_vocabularies, iterations=1, **kwargs)

    def test_no_documents(self):
        with pytest.raises(MetadataArgumentException):
            extract_topics({})


class TestMetadataPipeline:
    """Full and incremental builds against a simulated cluster."""

    def test_store_covers_articles_and_transcripts(self, loaded_cluster, corpus):
        store = loaded_cluster.metadata
        transcripts = sum(len(unit.media) for unit in corpus.units)

        assert store.article_ids == loaded_cluster.article_ids()
        assert store.document_count == loaded_cluster.article_count() + transcripts
        assert sum(store.pagerank.values()) == pytest.approx(1.0)

    def test_records_point_at_their_article(self, loaded_cluster):
        store = loaded_cluster.metadata
        transcript = next(r for r in store.records() if r.kind is DocumentKind.TRANSCRIPT)

        assert transcript.article_id in store.pagerank
        assert transcript.pagerank_score == store.pagerank[transcript.article_id]
        assert sum(transcript.topic_distribution.values()) == pytest.approx(1.0)

    def test_incremental_update_matches_full_build(self, corpus, pipeline_config):
        pipeline = MetadataPipeline(pipeline_config)
        cluster = SimulatedCluster()
        cluster.bulk_load(take_slice(corpus, 0.0, 0.6))
        partial = pipeline.build(cluster)

        rest = take_slice(corpus, 0.6, 1.0)
        cluster.bulk_load(rest)
        updated = pipeline.incremental_update(cluster, partial, rest)

        assert updated.document_count > partial.document_count
        assert updated.digest() == pipeline.build(cluster).digest()

    def test_incremental_update_needs_loaded_slice(self, corpus, pipeline_config):
        pipeline = MetadataPipeline(pipeline_config)
        cluster = SimulatedCluster()
        cluster.bulk_load(take_slice(corpus, 0.0, 0.6))
        store = pipeline.build(cluster)

        with pytest.raises(PipelineStateException) as exc_info:
            pipeline.incremental_update(cluster, store, take_slice(corpus, 0.6, 1.0))

        assert exc_info.value.error_class == "pipeline-state"

    def test_empty_slice_leaves_store_unchanged(self, loaded_cluster, corpus, pipeline_config):
        store = loaded_cluster.metadata

        pipeline = MetadataPipeline(pipeline_config)

        updated = pipeline.incremental_update(loaded_cluster, store, next_slice(corpus, 0.5, 0.0))

        assert updated is store

    def test_persist_and_load(self, loaded_cluster, tmp_path):
        store = loaded_cluster.metadata
        (tmp_path / "meta").mkdir()
        (tmp_path / "meta" / "stale-doc.xml").write_text("<old/>")

        paths = persist_metadata(store, tmp_path / "meta")
        loaded = load_metadata(tmp_path / "meta")

        assert len(paths) == store.document_count
        assert not (tmp_path / "meta" / "stale-doc.xml").exists()
        assert loaded.digest() == store.digest()
        assert loaded.index == store.index

    def test_load_missing_directory(self, tmp_path):
        with pytest.raises(PipelineStateException):
            load_metadata(tmp_path / "absent")
