"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """Input outside the domain an operation is defined on."""


class NumericalError(ArithmeticError):
    """Non-finite or degenerate numbers produced during a computation.

    ``node`` carries the flat grid index of the offending node when known.
    """

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class ConeExitError(NumericalError):
    """Curvature left the Garding cone where the flow speed requires it."""
