"""Fraction-based slices of a generated corpus.

A unit belongs to the slice whose byte range contains the unit's starting
offset, so slices over disjoint fraction ranges never share an article and
consecutive slices tile the corpus.
"""

import bisect
from typing import Iterator, List, Tuple

from ..corpus.models import Entity
from ..logging_config import get_logger
from .dataset import CorpusUnit, GeneratedCorpus
from .exceptions import NoExtraDataException, SliceRangeException

logger = get_logger(__name__)

_EPSILON = 1e-12


class Slice:
    """Portion ``[from_fraction, to_fraction)`` of a corpus, in publish-date order."""

    def __init__(
        self,
        corpus: GeneratedCorpus,
        from_fraction: float,
        to_fraction: float,
        units: Tuple[CorpusUnit, ...],
        include_shared: bool,
    ):
        self.corpus = corpus
        self.from_fraction = from_fraction
        self.to_fraction = to_fraction
        self.units = units
        self.include_shared = include_shared

    @property
    def manifest(self):
        return self.corpus.manifest

    @property
    def is_empty(self) -> bool:
        return not self.units and not self.include_shared

    @property
    def byte_size(self) -> int:
        shared = self.corpus.manifest.shared_bytes if self.include_shared else 0
        return shared + sum(unit.byte_size for unit in self.units)

    @property
    def unit_range(self) -> Tuple[int, int]:
        """Half-open range of unit indices covered."""
        if not self.units:
            return (0, 0)
        return (self.units[0].index, self.units[-1].index + 1)

    @property
    def article_ids(self) -> List[str]:
        return [unit.article.id for unit in self.units]

    def entities(self) -> Iterator[Entity]:
        if self.include_shared:
            yield from self.corpus.shared
        for unit in self.units:
            yield from unit.entities()

    def payload(self, media_id: str) -> bytes:
        return self.corpus.payload(media_id)

    def __len__(self) -> int:
        return len(self.units)

    def __repr__(self) -> str:
        return f"Slice([{self.from_fraction}, {self.to_fraction}), articles={len(self.units)}, bytes={self.byte_size})"


def take_slice(corpus: GeneratedCorpus, from_fraction: float, to_fraction: float) -> Slice:
    """Units whose start offset lies in ``[from, to) * total_bytes``."""
    if not (0.0 <= from_fraction < to_fraction <= 1.0):
        raise SliceRangeException(from_fraction, to_fraction)

    total = corpus.manifest.total_bytes
    offsets = [entry.offset for entry in corpus.manifest.units]
    low = bisect.bisect_left(offsets, from_fraction * total)
    high = len(offsets) if to_fraction >= 1.0 else bisect.bisect_left(offsets, to_fraction * total)
    selected = Slice(corpus, from_fraction, to_fraction, corpus.units[low:high], include_shared=from_fraction == 0.0)
    logger.debug("Took %r", selected)
    return selected


def next_slice(corpus: GeneratedCorpus, already_loaded_fraction: float, delta_fraction: float) -> Slice:
    """The slice right after what is already loaded."""
    if already_loaded_fraction < 0.0 or delta_fraction < 0.0:
        raise SliceRangeException(already_loaded_fraction, already_loaded_fraction + delta_fraction)
    requested = already_loaded_fraction + delta_fraction
    if already_loaded_fraction >= 1.0 - _EPSILON or requested > 1.0 + _EPSILON:
        raise NoExtraDataException(already_loaded_fraction, delta_fraction)
    if delta_fraction == 0.0:
        return Slice(corpus, already_loaded_fraction, already_loaded_fraction, (), include_shared=False)
    return take_slice(corpus, already_loaded_fraction, min(1.0, requested))
