"""Shared state of a benchmark run: corpus, backend, clock and metadata."""

import datetime as dt
from typing import Optional, Union

from ..backend.cluster import SimulatedCluster
from ..backend.interface import BackendInterface
from ..generator.corpus_generator import CorpusGenerator, generate_corpus
from ..generator.dataset import GeneratedCorpus
from ..generator.slicing import Slice, take_slice
from ..logging_config import get_logger, log_performance
from ..metadata.pipeline import MetadataPipeline, MetadataStore, install
from ..queries.engine import QueryEngine
from .clock import RealClock, VirtualClock
from .executor import make_executor
from .models import ClockMode, ScenarioConfig

logger = get_logger(__name__)

AnyClock = Union[RealClock, VirtualClock]


def make_clock(config: ScenarioConfig) -> AnyClock:
    if config.clock_mode is ClockMode.VIRTUAL:
        return VirtualClock(config.speedup)
    return RealClock()


class BenchmarkContext:
    """Everything the scenarios act on.

    ``loaded_fraction`` tracks how much of ``corpus`` the backend holds; the
    virtual "today" is the newest loaded publish date advanced by the clock.
    """

    def __init__(
        self,
        config: ScenarioConfig,
        corpus: GeneratedCorpus,
        backend: BackendInterface,
        clock: AnyClock,
        store: Optional[MetadataStore] = None,
        loaded_fraction: float = 0.0,
    ):
        self.config = config
        self.corpus = corpus
        self.backend = backend
        self.clock = clock
        self.store = store
        self.loaded_fraction = loaded_fraction
        self.pipeline = MetadataPipeline(config.pipeline)
        self._base_date: Optional[dt.date] = None
        self._engine: Optional[QueryEngine] = None
        self._generator: Optional[CorpusGenerator] = None
        if loaded_fraction > 0.0:
            self._base_date = self._newest_publish_date(take_slice(corpus, 0.0, loaded_fraction))

    @staticmethod
    def _newest_publish_date(data: Slice) -> Optional[dt.date]:
        return max((unit.article.publish_date for unit in data.units), default=None)

    def note_loaded(self, data: Slice) -> None:
        """Advance bookkeeping after ``data`` went into the backend."""
        self.loaded_fraction = max(self.loaded_fraction, data.to_fraction)
        newest = self._newest_publish_date(data)
        if newest is not None and (self._base_date is None or newest > self._base_date):
            self._base_date = newest

    def current_date(self) -> dt.date:
        base = self._base_date or self.corpus.config.start_date
        moment = dt.datetime.combine(base, dt.time()) + dt.timedelta(seconds=self.clock.now())
        return moment.date()

    @property
    def engine(self) -> QueryEngine:
        if self._engine is None:
            self._engine = QueryEngine(self.backend, current_date=self.current_date)
        return self._engine

    @property
    def generator(self) -> CorpusGenerator:
        """Source of extra articles for insert workloads."""
        if self._generator is None:
            self._generator = CorpusGenerator(self.corpus.config)
        return self._generator

    def executor(self):
        return make_executor(self.clock, self.backend, self.config.cost_model)

    def load_initial(self) -> MetadataStore:
        """Initialize an empty backend: first slice, full pipeline, install."""
        data = take_slice(self.corpus, 0.0, self.config.initial_fraction)
        with log_performance("initial_load", logger):
            self.backend.bulk_load(data)
            self.note_loaded(data)
            self.store = self.pipeline.build(self.backend)
            install(self.backend, self.store)
        return self.store


def prepare_context(
    config: ScenarioConfig,
    corpus: Optional[GeneratedCorpus] = None,
    load: bool = True,
) -> BenchmarkContext:
    """Generate (or reuse) the corpus, start a fresh cluster and optionally load it.

    The corpus holds ``corpus_multiplier`` times the scale factor so that
    scale-up scenarios have data left to add.
    """
    if corpus is None:
        generator_config = config.generator.model_copy(update={
            "seed": config.seed,
            "scale_factor_gb": config.generator.scale_factor_gb * config.corpus_multiplier,
        })
        corpus = generate_corpus(generator_config)
    clock = make_clock(config)
    backend = SimulatedCluster(config.cluster, clock=clock.now)
    context = BenchmarkContext(config, corpus, backend, clock)
    if load:
        context.load_initial()
    logger.info(
        "Prepared %s context: %d corpus articles, %.2f loaded, %d nodes",
        config.clock_mode.value, corpus.article_count, context.loaded_fraction, config.cluster.nodes,
    )
    return context
