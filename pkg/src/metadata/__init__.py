"""Metadata extraction: TF-IDF index, weighted PageRank and LDA topics."""

from .pagerank import CitationGraph, compute_pagerank
from .pipeline import MetadataPipeline, MetadataStore, PipelineConfig, install, load_metadata, persist_metadata
from .tfidf import InvertedIndex, build_tfidf
from .tokenizer import tokenize
from .topics import GibbsSampler, TopicModelState, extract_topics

__all__ = [
    "CitationGraph",
    "GibbsSampler",
    "InvertedIndex",
    "MetadataPipeline",
    "MetadataStore",
    "PipelineConfig",
    "TopicModelState",
    "build_tfidf",
    "compute_pagerank",
    "extract_topics",
    "install",
    "load_metadata",
    "persist_metadata",
    "tokenize",
]
