"""
core/errors.py
──────────────────────────────────────────────────────────────────────────────
Exception hierarchy shared by every module of the toolkit.
Each class carries the process exit status the CLI maps it to.
──────────────────────────────────────────────────────────────────────────────
"""

from typing import Optional


class GridModError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 10


# ─────────────────────────────────────────────────────────────────────────────
# 1.  INPUT / CONTRACT ERRORS
# ─────────────────────────────────────────────────────────────────────────────

class ContractViolationError(GridModError, ValueError):
    """A caller broke a documented precondition (shapes, windows, ...)."""

    exit_code = 4


class InvalidSpreadError(ContractViolationError):
    exit_code = 4


class InvalidPresentationError(ContractViolationError):
    exit_code = 4


class InvalidBifiltrationError(ContractViolationError):
    exit_code = 4


class PreconditionError(ContractViolationError):
    """Input is well formed but outside an operation's domain (e.g. not ephemeral)."""

    exit_code = 4


class ParseError(GridModError, ValueError):
    exit_code = 3

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InputFileError(GridModError):
    exit_code = 2


class OutputFileError(GridModError):
    """A result file (the SVG of `plot`) could not be written."""

    exit_code = 11


# ─────────────────────────────────────────────────────────────────────────────
# 2.  FIELD / SIZE ERRORS
# ─────────────────────────────────────────────────────────────────────────────

class FieldError(GridModError, ValueError):
    exit_code = 6


class FieldMismatchError(FieldError):
    exit_code = 6


class FieldTooSmallError(FieldError):
    """Decomposition needs p > total dimension of the representation."""

    exit_code = 6

    def __init__(self, p: int, total_dim: int):
        self.p = p
        self.total_dim = total_dim
        super().__init__(
            f"field F_{p} is too small for a representation of total dimension {total_dim}; "
            f"rerun with --field set to a prime larger than {total_dim} (e.g. 65521)"
        )


class SizeLimitError(GridModError, ValueError):
    exit_code = 5


# ─────────────────────────────────────────────────────────────────────────────
# 3.  INTERNAL ERRORS
# ─────────────────────────────────────────────────────────────────────────────

class InternalInconsistencyError(GridModError, RuntimeError):
    """A certificate or invariant failed on data we constructed ourselves."""

    exit_code = 7


class DecompositionIncompleteError(InternalInconsistencyError):
    exit_code = 8


class MobiusInversionError(InternalInconsistencyError):
    exit_code = 9


class CheckFailedError(GridModError):
    """An invariant check requested by the user did not hold."""

    exit_code = 1
