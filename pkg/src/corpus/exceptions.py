"""Exceptions raised by the corpus model and its XML codec."""

from typing import Optional

from ..exceptions import InternalException, PreconditionException, UsageException


class CorpusException(PreconditionException):
    """Base exception for corpus-model errors."""


class SerializationException(CorpusException):
    """An entity was refused by the serializer because an invariant is violated."""

    def __init__(self, invariant: str, entity_id: Optional[str] = None, detail: Optional[str] = None):
        message = f"Invariant violated: {invariant}"
        if entity_id:
            message += f" (entity: {entity_id})"
        if detail:
            message += f": {detail}"
        super().__init__(message, invariant=invariant, entity_id=entity_id)
        self.invariant = invariant
        self.entity_id = entity_id


class XMLParseException(UsageException):
    """Input bytes are not well-formed XML."""

    error_class = "parse"

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} at byte {byte_offset}", byte_offset=byte_offset)
        self.byte_offset = byte_offset


class SchemaException(UsageException):
    """Well-formed XML that does not follow the documented schema."""

    error_class = "schema"

    def __init__(self, message: str, element: Optional[str] = None):
        if element:
            message = f"{message} (element: {element})"
        super().__init__(message, element=element)
        self.element = element


class DanglingReferenceException(CorpusException):
    """An entity references an id that does not resolve in the loaded data."""

    def __init__(self, entity_id: str, reference_kind: str, missing_id: str):
        super().__init__(
            f"{entity_id} references unknown {reference_kind} {missing_id}",
            entity_id=entity_id,
            reference_kind=reference_kind,
            missing_id=missing_id,
        )
        self.entity_id = entity_id
        self.reference_kind = reference_kind
        self.missing_id = missing_id


class CodecException(InternalException):
    """The codec was handed an object it does not know how to encode."""
