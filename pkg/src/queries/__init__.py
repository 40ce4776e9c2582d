"""Generic query set Q1-Q14, full-text search and analytics A1-A4."""

from .defaults import default_query_set
from .engine import QueryEngine, execute_analytic, execute_query
from .exceptions import QueryArgumentException
from .models import ANALYTIC_KINDS, GENERIC_KINDS, QueryKind, QueryResult, QuerySpec

__all__ = [
    "ANALYTIC_KINDS",
    "GENERIC_KINDS",
    "QueryArgumentException",
    "QueryEngine",
    "QueryKind",
    "QueryResult",
    "QuerySpec",
    "default_query_set",
    "execute_analytic",
    "execute_query",
]
