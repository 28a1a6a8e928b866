"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class BeliefDBError(Exception):
    """Base class for all errors raised by beliefdb."""


class SchemaError(BeliefDBError):
    """A tuple, relation or attribute does not match the declared schema."""


class InvalidPathError(BeliefDBError):
    """A belief path repeats a user consecutively or names an unknown user."""


class InconsistentError(BeliefDBError):
    """A belief world or belief database violates the key/sign constraints."""


class UnsafeQueryError(BeliefDBError):
    """A query has a variable without a positive occurrence."""


class StoreFormatError(BeliefDBError):
    """A dump file is malformed or fails an integrity check on load."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SqlError(BeliefDBError):
    """A BeliefSQL statement failed to parse or lower; carries its source span."""

    def __init__(self, message: str, span=None, expected: frozenset[str] = frozenset()):
        self.reason = message
        self.span = span
        self.expected = frozenset(expected)
        text = message
        if expected:
            text += f" (expected one of: {', '.join(sorted(expected))})"
        if span is not None:
            text = f"line {span.line}, column {span.column}: {text}"
        super().__init__(text)
