"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class BellChainError(Exception):
    """Base class for every error raised by bellchain."""


class DimensionError(BellChainError, ValueError):
    """Mismatched or oversized Hilbert-space dimensions."""


class ValidationError(BellChainError, ValueError):
    """An input violates a documented precondition."""


class SolverError(BellChainError, RuntimeError):
    """The eigensolver failed to reach the requested residual."""

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class IntegrityError(BellChainError, RuntimeError):
    """A numerically solved object does not have the structure theory demands."""
