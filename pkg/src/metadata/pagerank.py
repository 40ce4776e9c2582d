"""Weighted PageRank over the article citation graph."""

from typing import Dict, Iterable, List, Mapping, Tuple

import numpy as np
from scipy import sparse

from ..corpus.models import Article
from ..logging_config import get_logger
from .exceptions import MetadataArgumentException

logger = get_logger(__name__)

DEFAULT_DAMPING = 0.85
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERATIONS = 100


class CitationGraph:
    """Citing to cited edges weighted by citation multiplicity."""

    def __init__(self, nodes: Iterable[str], edges: Mapping[Tuple[str, str], float]):
        self.nodes: List[str] = sorted(set(nodes))
        known = set(self.nodes)
        for (source, target), weight in edges.items():
            if source not in known or target not in known:
                raise MetadataArgumentException("edge", (source, target), "endpoint is not a graph node")
            if weight <= 0:
                raise MetadataArgumentException("edge weight", weight, "must be positive")
        self.edges: Dict[Tuple[str, str], float] = dict(sorted(edges.items()))

    @classmethod
    def from_articles(cls, articles: Iterable[Article]) -> "CitationGraph":
        """Citations to articles outside the given set are dropped."""
        articles = list(articles)
        known = {a.id for a in articles}
        edges: Dict[Tuple[str, str], float] = {}
        for article in articles:
            for cited in article.citations:
                if cited in known:
                    edges[(article.id, cited)] = edges.get((article.id, cited), 0.0) + 1.0
        return cls(known, edges)

    def __len__(self) -> int:
        return len(self.nodes)

    def transition_matrix(self) -> sparse.csr_matrix:
        """Row-stochastic matrix for nodes with out-links; dangling rows stay zero."""
        position = {node: i for i, node in enumerate(self.nodes)}
        n = len(self.nodes)
        if not self.edges:
            return sparse.csr_matrix((n, n))
        rows = np.array([position[s] for s, _ in self.edges], dtype=np.int64)
        cols = np.array([position[t] for _, t in self.edges], dtype=np.int64)
        weights = np.array(list(self.edges.values()), dtype=np.float64)
        out_weight = np.bincount(rows, weights=weights, minlength=n)
        return sparse.csr_matrix((weights / out_weight[rows], (rows, cols)), shape=(n, n))


def compute_pagerank(
    graph: CitationGraph,
    damping: float = DEFAULT_DAMPING,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> Dict[str, float]:
    """Power iteration with uniform teleport; dangling mass is spread uniformly.

    Stops when the L1 change falls below ``tolerance`` or after ``max_iterations``.
    """
    if not 0.0 < damping < 1.0:
        raise MetadataArgumentException("damping", damping, "must lie strictly between 0 and 1")
    if max_iterations < 1:
        raise MetadataArgumentException("max_iterations", max_iterations, "must be at least 1")
    n = len(graph)
    if n == 0:
        return {}

    transposed = graph.transition_matrix().T.tocsr()
    dangling = np.asarray(transposed.sum(axis=0)).ravel() == 0.0
    x = np.full(n, 1.0 / n)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        previous = x
        x = damping * (transposed @ previous + previous[dangling].sum() / n) + (1.0 - damping) / n
        if np.abs(x - previous).sum() < tolerance:
            break
    x = x / x.sum()
    logger.debug("PageRank over %d nodes converged after %d iterations", n, iterations)
    return {node: float(score) for node, score in zip(graph.nodes, x)}
