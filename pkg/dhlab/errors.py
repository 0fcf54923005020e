"""Error hierarchy for dhlab.

Every error carries the CLI exit code it maps to: 2 for inputs that no
manifold could produce (or that violate an operation's preconditions), 3 for
certificates that disagree with themselves.
"""

from typing import Optional

from dhlab.config import EXIT_INCONSISTENT, EXIT_INVALID_INPUT


class DhlabError(Exception):
    """Base class for all dhlab errors."""

    exit_code = EXIT_INVALID_INPUT


class InputError(DhlabError):
    """The input violates a precondition."""


class DimensionMismatch(InputError):
    pass


class NotPositive(InputError):
    pass


class InsufficientBPlus(InputError):
    pass


class ZeroVector(InputError):
    pass


class NotQuadratic(InputError):
    pass


class BoundaryWall(InputError):
    """A wall with a piece on one side only (extreme of the moment image)."""


class NegativeBetti(InputError):
    pass


class NonIntegralBPlus(InputError):
    pass


class IllegalStratum(InputError):
    pass


class EmptyLambda(InputError):
    pass


class NoEpsilonFound(InputError):
    pass


class NonPositiveDensity(InputError):
    pass


class ParseError(InputError):
    """Malformed input document.

    Args:
        message: What is wrong
        field: JSON path of the offending field, if known
        line: Line number in the document, if known
    """

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ConsistencyError(DhlabError):
    """Two exact computations that must agree did not (a bug signal)."""

    exit_code = EXIT_INCONSISTENT


class CertificateFailed(ConsistencyError):
    pass


class InternalDivisionInexact(ConsistencyError):
    pass


class InternalInconsistency(ConsistencyError):
    pass
