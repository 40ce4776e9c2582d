"""Exceptions raised by the metadata pipeline."""

from typing import Optional

from ..exceptions import PreconditionException, UsageException


class MetadataException(PreconditionException):
    """Base exception for metadata-pipeline errors."""


class PipelineStateException(MetadataException):
    """A pipeline stage was invoked before the state it needs exists."""

    error_class = "pipeline-state"

    def __init__(self, message: str, missing: Optional[str] = None):
        super().__init__(message, missing=missing)
        self.missing = missing


class MetadataArgumentException(UsageException):
    """Out-of-range damping factor, topic count or similar parameter."""

    def __init__(self, parameter: str, value, reason: str):
        super().__init__(f"{parameter}={value!r}: {reason}", parameter=parameter, value=value)
        self.parameter = parameter


class MetadataWriteException(MetadataException):
    """A metadata file could not be written."""

    error_class = "metadata-write"

    def __init__(self, path: str, detail: str):
        super().__init__(f"cannot write metadata to {path}: {detail}", path=path)
        self.path = path
