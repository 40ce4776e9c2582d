"""Exceptions raised by storage backends."""

from typing import Optional

from ..exceptions import ConfigurationException, PreconditionException


class BackendException(PreconditionException):
    """Base exception for backend operation failures."""

    def __init__(self, message: str, key: Optional[str] = None, **context):
        super().__init__(message, key=key, **context)
        self.key = key


class ConflictException(BackendException):
    """Duplicate article, entity or node id."""

    error_class = "conflict"

    def __init__(self, key: str, what: str = "article"):
        super().__init__(f"{what} {key} already exists", key=key, what=what)


class NotFoundException(BackendException):
    """Unknown or deleted id."""

    error_class = "not-found"

    def __init__(self, key: str, what: str = "article"):
        super().__init__(f"{what} {key} not found", key=key, what=what)


class UnavailableException(BackendException):
    """Every replica holding the requested data is on a dead node."""

    error_class = "unavailable"

    def __init__(self, key: Optional[str] = None, shard: Optional[int] = None):
        target = f"key {key}" if key else f"shard {shard}"
        super().__init__(f"no live replica for {target}", key=key, shard=shard)
        self.shard = shard


class IndexNotBuiltException(BackendException):
    """Search was requested before a metadata index was installed."""

    error_class = "index-not-built"

    def __init__(self):
        super().__init__("index not built: run the metadata pipeline before searching")


class BackendConfigException(ConfigurationException):
    """Invalid cluster topology or persistence settings."""
