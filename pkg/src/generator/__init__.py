"""Deterministic synthetic corpus generation and slicing."""

from .corpus_generator import CorpusGenerator, generate_corpus
from .corpus_store import open_corpus, write_corpus
from .dataset import CorpusUnit, GeneratedCorpus
from .models import CorpusManifest, GeneratorConfig
from .slicing import Slice, next_slice, take_slice

__all__ = [
    "CorpusGenerator",
    "CorpusManifest",
    "CorpusUnit",
    "GeneratedCorpus",
    "GeneratorConfig",
    "Slice",
    "generate_corpus",
    "next_slice",
    "open_corpus",
    "take_slice",
    "write_corpus",
]
