"""Exceptions raised by the query engine."""

from typing import Optional

from ..exceptions import PreconditionException, UsageException


class QueryArgumentException(UsageException):
    """A query is missing a parameter its kind requires, or a value is out of range."""

    def __init__(self, kind: str, message: str, parameter: Optional[str] = None):
        super().__init__(f"{kind}: {message}", kind=kind, parameter=parameter)
        self.kind = kind
        self.parameter = parameter


class NoDataException(PreconditionException):
    """Query parameters cannot be derived from an empty store."""

    error_class = "no-data"
