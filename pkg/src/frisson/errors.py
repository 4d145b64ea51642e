"""Exception taxonomy shared across the package.

Every error carries a stable machine-readable ``code`` string; the CLI maps
codes to exit statuses and the stream server relays them inside ``err``
frames.
"""

from __future__ import annotations


class FrissonError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class InvalidParameterError(FrissonError):
    code = "invalid-parameter"


class InvalidInputError(FrissonError):
    code = "invalid-input"


class ShapeMismatchError(FrissonError):
    code = "shape-mismatch"


class InsufficientDataError(FrissonError):
    code = "insufficient-data"


class ProtocolViolationError(FrissonError):
    code = "protocol-violation"


class ParseError(FrissonError):
    """Malformed text input; ``line`` is 1-based when known."""

    code = "parse-error"

    def __init__(self, message: str, *, line: int | None = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class EncodeError(FrissonError):
    code = "encode-error"


class FormatError(FrissonError):
    code = "format-error"


class NotFoundError(FrissonError):
    code = "not_found"
