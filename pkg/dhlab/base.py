"""Base certifier shared by the density, wall-crossing, construction and Lefschetz engines."""

import logging
from fractions import Fraction
from typing import Sequence

from dhlab.errors import DimensionMismatch, NotPositive


class BaseCertifier:
    """Base class containing common functionality for all certifiers."""

    def __init__(self):
        """Initialize the certifier with a logger named after the concrete class."""
        self.logger = logging.getLogger(self.__class__.__name__)

    def require_length(self, values: Sequence, expected: int, name: str) -> None:
        """Check that a vector has the expected length.

        Args:
            values: Vector to check
            expected: Required length
            name: Field name used in the error message

        Raises:
            DimensionMismatch: If the length differs
        """
        if len(values) != expected:
            self.logger.error(f"{name} has length {len(values)}, expected {expected}")
            raise DimensionMismatch(f"{name} has length {len(values)}, expected {expected}")

    def require_positive(self, value: Fraction, name: str) -> None:
        """Reject non-positive scalars.

        Args:
            value: Scalar to check
            name: Field name used in the error message
        """
        if value <= 0:
            raise NotPositive(f"{name} must be positive, got {value}")

    def log_verdict(self, subject: str, verdict: object) -> None:
        """Log a computed verdict.

        Args:
            subject: What was certified
            verdict: Verdict object or value
        """
        self.logger.info(f"{subject}: {verdict}")
