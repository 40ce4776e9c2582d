"""Deterministic parameters for the whole generic query set."""

import datetime as dt
import statistics
from collections import Counter
from typing import List, Optional

from ..backend.interface import BackendInterface
from ..corpus.models import Article, Journalist
from ..corpus.xml_codec import add_years
from ..metadata.tokenizer import tokenize
from .exceptions import NoDataException
from .models import DEFAULT_LIMIT, QueryKind, QuerySpec

INTERVAL_DAYS = 30
GROUP_INTERVAL_DAYS = 90
RECENT_CITATION_DAYS = 365


def _most_common(values, default=None):
    counts = Counter(values)
    if not counts:
        return default
    return min(counts.items(), key=lambda item: (-item[1], item[0]))[0]


def _q13_document(articles: List[Article]) -> str:
    days = {a.publish_date for a in articles}
    for article in articles:
        if add_years(article.publish_date, 1) in days:
            return article.id
    return articles[0].id


def default_query_set(
    backend: BackendInterface, now: Optional[dt.date] = None, limit: Optional[int] = DEFAULT_LIMIT
) -> List[QuerySpec]:
    """Q1-Q14 with parameters derived from the loaded data.

    The busiest publication day anchors dates and intervals; the most
    prolific journalist and most common topic fill the entity parameters.
    """
    articles = sorted(backend.scan_articles(), key=lambda a: a.id)
    if not articles:
        raise NoDataException("cannot derive query parameters from an empty store")
    authors = {a.id: a for a in backend.list_entities("author")}

    day = _most_common(a.publish_date for a in articles)
    if now is not None and day > now:
        day = now
    interval_start = day - dt.timedelta(days=INTERVAL_DAYS)
    journalist_articles = [a for a in articles if isinstance(authors.get(a.author_id), Journalist)]
    journalist = _most_common((a.author_id for a in journalist_articles), default=articles[0].author_id)
    topic = _most_common((t for a in articles for t in a.topic_ids), default="")
    sample = articles[0]
    sample_tokens = tokenize(sample.title) or tokenize(sample.body) or ["news"]
    birth_years = [a.birth_date.year for a in authors.values() if isinstance(a, Journalist)]
    pivot_year = int(statistics.median(birth_years)) if birth_years else day.year - 40

    params = {
        QueryKind.Q1: {},
        QueryKind.Q2: {"date_from": interval_start, "date_to": day},
        QueryKind.Q3: {"journalist_id": journalist, "date_from": dt.date(day.year - 5, 1, 1), "date_to": day},
        QueryKind.Q4: {"on_date": day},
        QueryKind.Q5: {"month": day.month, "year": day.year},
        QueryKind.Q6: {"day_of_year": day.timetuple().tm_yday, "year1": day.year, "year2": day.year - 1},
        QueryKind.Q7: {"on_date": day},
        QueryKind.Q8: {"topic_id": topic, "interval_days": RECENT_CITATION_DAYS},
        QueryKind.Q9: {},
        QueryKind.Q10: {
            "date_from": day - dt.timedelta(days=GROUP_INTERVAL_DAYS),
            "date_to": day,
            "min_journalists": 2,
            "min_common_topics": 1,
        },
        QueryKind.Q11: {},
        QueryKind.Q12: {"term": sample_tokens[0], "author_id": sample.author_id, "country_id": sample.country_id},
        QueryKind.Q13: {"document_id": _q13_document(articles)},
        QueryKind.Q14: {"year": pivot_year},
    }
    return [QuerySpec(kind=kind, limit=limit, **values) for kind, values in params.items()]
