"""Error taxonomy shared across the package.

Four classes of failure, mapped to CLI exit codes in qpp.cli:
domain errors (bad argument values), capacity errors (instance too large for
the dense representation), validation errors (malformed objects or programs),
and parse errors (surface-syntax diagnostics with position information).
"""


class QppError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QppError, ValueError):
    """An argument value is outside the operation's domain."""


class CapacityError(QppError):
    """The requested instance exceeds a documented size budget."""


class ValidationError(QppError):
    """An object or program fails a structural well-formedness check."""


class ParseError(QppError):
    """Surface-syntax error with source position and expectations."""

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += " (expected " + " or ".join(self.expected) + ")"
        super().__init__(detail)
