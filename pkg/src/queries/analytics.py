"""Analytical queries A1-A4, aggregated with pandas."""

import datetime as dt
from typing import TYPE_CHECKING, List, Tuple

import pandas as pd

from ..backend.interface import BackendInterface
from ..corpus.models import Journalist
from .models import QueryKind, QuerySpec

if TYPE_CHECKING:
    from .engine import Snapshot

DEFAULT_VIEWS_YEAR = 2010
TOP_VIEWED_PER_MONTH = 10

Rows = Tuple[List[dict], int]


def age_on(birth_date: dt.date, today: dt.date) -> int:
    """Completed years."""
    return today.year - birth_date.year - ((today.month, today.day) < (birth_date.month, birth_date.day))


def _records(frame: pd.DataFrame) -> List[dict]:
    return [{k: (v.item() if hasattr(v, "item") else v) for k, v in row.items()} for row in frame.to_dict("records")]


def top_viewed(snapshot: "Snapshot", year: int) -> Rows:
    prefix = f"{year:04d}-"
    views = [
        (month, article.id, count)
        for article in snapshot.articles
        for month, count in article.monthly_views.items()
        if month.startswith(prefix) and count > 0
    ]
    if not views:
        return [], 0
    frame = pd.DataFrame(views, columns=["month", "article_id", "views"])
    frame = frame.sort_values(["month", "views", "article_id"], ascending=[True, False, True])
    frame = frame.groupby("month", sort=True).head(TOP_VIEWED_PER_MONTH).copy()
    frame["rank"] = frame.groupby("month").cumcount() + 1
    rows = _records(frame[["month", "rank", "article_id", "views"]])
    return rows, len(rows)


def pages_per_journalist(snapshot: "Snapshot") -> Rows:
    authors = snapshot.authors
    pages = [
        (article.author_id, article.page_count)
        for article in snapshot.articles
        if isinstance(authors.get(article.author_id), Journalist)
    ]
    if not pages:
        return [], 0
    frame = pd.DataFrame(pages, columns=["journalist_id", "page_count"])
    summary = (
        frame.groupby("journalist_id", sort=True)["page_count"]
        .agg(articles="count", mean_pages="mean")
        .reset_index()
    )
    rows = _records(summary)
    return rows, len(rows)


def author_ages(snapshot: "Snapshot", today: dt.date) -> Rows:
    ages = pd.Series([age_on(a.birth_date, today) for a in snapshot.authors.values()], dtype="float64")
    if ages.empty:
        return [], 0
    row = {
        "authors": int(ages.size),
        "mean_age": float(ages.mean()),
        "stddev_age": float(ages.std(ddof=0)),
        "as_of": today.isoformat(),
    }
    return [row], 1


def max_versions(snapshot: "Snapshot", backend: BackendInterface) -> Rows:
    if not snapshot.articles:
        return [], 0
    counts = pd.Series({a.id: len(backend.version_history(a.id)) for a in snapshot.articles}).sort_index()
    article_id = counts.idxmax()
    return [{"max_versions": int(counts[article_id]), "article_id": article_id}], 1


def run_analytic(spec: QuerySpec, snapshot: "Snapshot", today: dt.date, backend: BackendInterface) -> Rows:
    if spec.kind is QueryKind.A1:
        return top_viewed(snapshot, spec.year or DEFAULT_VIEWS_YEAR)
    if spec.kind is QueryKind.A2:
        return pages_per_journalist(snapshot)
    if spec.kind is QueryKind.A3:
        return author_ages(snapshot, today)
    return max_versions(snapshot, backend)
