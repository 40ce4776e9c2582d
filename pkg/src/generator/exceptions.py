"""Exceptions raised while generating, slicing and storing corpora."""

from typing import Optional

from ..exceptions import ConfigurationException, PreconditionException, UsageException


class GeneratorConfigException(ConfigurationException):
    """The generator configuration cannot produce a valid corpus."""

    def __init__(self, message: str, field: Optional[str] = None):
        if field:
            message = f"{message} (field: {field})"
        super().__init__(message, field=field)
        self.field = field


class SliceRangeException(UsageException):
    """Fractions passed to a slice request are out of range or empty."""

    def __init__(self, from_fraction: float, to_fraction: float):
        super().__init__(
            f"Invalid slice range [{from_fraction}, {to_fraction}): need 0 <= from < to <= 1",
            from_fraction=from_fraction,
            to_fraction=to_fraction,
        )
        self.from_fraction = from_fraction
        self.to_fraction = to_fraction


class NoExtraDataException(PreconditionException):
    """The corpus has no articles left beyond what is already loaded."""

    error_class = "no-extra-data"

    def __init__(self, loaded_fraction: float, requested_fraction: float):
        super().__init__(
            "No extra data available: the corpus is exhausted, updates and scale operations are not possible "
            f"(loaded {loaded_fraction:.4f}, requested {requested_fraction:.4f})",
            loaded_fraction=loaded_fraction,
            requested_fraction=requested_fraction,
        )


class CorpusStoreException(PreconditionException):
    """A corpus directory cannot be written or read."""

    def __init__(self, message: str, path: Optional[str] = None):
        if path:
            message = f"{message} (path: {path})"
        super().__init__(message, path=path)
        self.path = path
