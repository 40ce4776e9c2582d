"""Query specifications and results."""

import datetime as dt
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import QueryArgumentException

DEFAULT_LIMIT = 20
MAX_GROUP_JOURNALISTS = 3


class QueryKind(str, Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"
    Q5 = "Q5"
    Q6 = "Q6"
    Q7 = "Q7"
    Q8 = "Q8"
    Q9 = "Q9"
    Q10 = "Q10"
    Q11 = "Q11"
    Q12 = "Q12"
    Q13 = "Q13"
    Q14 = "Q14"
    FT = "FT"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"

    @property
    def is_analytic(self) -> bool:
        return self.value.startswith("A")


GENERIC_KINDS: Tuple[QueryKind, ...] = tuple(QueryKind(f"Q{i}") for i in range(1, 15))
ANALYTIC_KINDS: Tuple[QueryKind, ...] = (QueryKind.A1, QueryKind.A2, QueryKind.A3, QueryKind.A4)

REQUIRED_PARAMETERS: Dict[QueryKind, Tuple[str, ...]] = {
    QueryKind.Q1: (),
    QueryKind.Q2: ("date_from", "date_to"),
    QueryKind.Q3: ("journalist_id", "date_from", "date_to"),
    QueryKind.Q4: ("on_date",),
    QueryKind.Q5: ("month", "year"),
    QueryKind.Q6: ("day_of_year", "year1", "year2"),
    QueryKind.Q7: ("on_date",),
    QueryKind.Q8: ("topic_id", "interval_days"),
    QueryKind.Q9: (),
    QueryKind.Q10: ("date_from", "date_to", "min_journalists", "min_common_topics"),
    QueryKind.Q11: (),
    QueryKind.Q12: ("term", "author_id", "country_id"),
    QueryKind.Q13: ("document_id",),
    QueryKind.Q14: ("year",),
    QueryKind.FT: ("term",),
    QueryKind.A1: (),
    QueryKind.A2: (),
    QueryKind.A3: (),
    QueryKind.A4: (),
}


class QuerySpec(BaseModel):
    """One query invocation: kind plus the parameters that kind uses."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: QueryKind
    on_date: Optional[dt.date] = Field(default=None, description="D for Q4/Q7")
    date_from: Optional[dt.date] = Field(default=None, description="Start of interval I (inclusive)")
    date_to: Optional[dt.date] = Field(default=None, description="End of interval I (inclusive)")
    interval_days: Optional[int] = Field(default=None, ge=1, description="Q8 look-back ending at the current date")
    journalist_id: Optional[str] = None
    topic_id: Optional[str] = None
    month: Optional[int] = Field(default=None, ge=1, le=12)
    year: Optional[int] = None
    year1: Optional[int] = None
    year2: Optional[int] = None
    day_of_year: Optional[int] = Field(default=None, ge=1, le=366)
    min_journalists: Optional[int] = Field(default=None, ge=1, description="X in Q10")
    min_common_topics: Optional[int] = Field(default=None, ge=1, description="Y in Q10")
    author_id: Optional[str] = None
    country_id: Optional[str] = None
    term: Optional[str] = None
    document_id: Optional[str] = None
    limit: Optional[int] = Field(default=DEFAULT_LIMIT, ge=1, description="Top-k; None returns every row")

    def check(self) -> "QuerySpec":
        """Raise :class:`QueryArgumentException` unless every parameter the kind needs is set."""
        for name in REQUIRED_PARAMETERS[self.kind]:
            if getattr(self, name) is None:
                raise QueryArgumentException(self.kind.value, f"missing parameter {name}", parameter=name)
        if self.date_from is not None and self.date_to is not None and self.date_from > self.date_to:
            raise QueryArgumentException(self.kind.value, "interval starts after it ends", parameter="date_from")
        if self.kind is QueryKind.Q10 and self.min_journalists > MAX_GROUP_JOURNALISTS:
            raise QueryArgumentException(
                self.kind.value, f"at most {MAX_GROUP_JOURNALISTS} journalists per group", parameter="min_journalists"
            )
        if self.kind in (QueryKind.Q12, QueryKind.FT) and not self.term.strip():
            raise QueryArgumentException(self.kind.value, "empty search term", parameter="term")
        return self

    def parameters(self) -> Dict[str, Any]:
        """Set parameters only, JSON-ready."""
        return self.model_dump(mode="json", exclude={"kind"}, exclude_none=True)


class QueryResult(BaseModel):
    """Rows of one query execution; row layout is documented per kind."""

    kind: QueryKind
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    total_matched: int = Field(default=0, ge=0)
    execution_time: float = Field(default=0.0, ge=0.0, description="Wall seconds")

    def column(self, name: str) -> List[Any]:
        return [row.get(name) for row in self.rows]
