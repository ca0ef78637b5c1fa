"""Exception types shared across the toolkit."""

from __future__ import annotations


class EdtlcError(Exception):
    """Base class for all toolkit errors."""


class ExprSyntaxError(EdtlcError):
    """Raised when expression or formula text cannot be parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundIdentifierError(EdtlcError):
    """An identifier referenced during evaluation has no binding."""


class OracleLimitError(EdtlcError):
    """The equivalence oracle would exceed its configured trace budget."""


class CanonicalRenameError(EdtlcError):
    """Atom renaming hit a comparison atom, which has no simple name."""


class PhraseSyntaxError(EdtlcError):
    """A CNL phrase or template does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NoTemplateError(EdtlcError):
    """No usable CNL template exists for the requested class."""

    def __init__(self, message: str, class_id: int | None = None):
        super().__init__(message)
        self.class_id = class_id


class AmbiguousPhraseError(EdtlcError):
    """A phrase matches more than one corpus template."""

    def __init__(self, message: str, class_ids: list[int]):
        super().__init__(message)
        self.class_ids = class_ids


class AllVariableError(EdtlcError):
    """Prompt generation got a combination with no constant attributes."""


class CorpusVersionError(EdtlcError):
    """Writing a new corpus version collided with an existing file."""


class CorruptReportError(EdtlcError):
    """A classification report does not cover the full combination space."""
