"""Exception types raised by spdsr."""

from __future__ import annotations


class SpdsrError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(SpdsrError, ValueError):
    """Malformed input: wrong shape, non-finite entries, not symmetric, ..."""


class DomainError(SpdsrError, ValueError):
    """Input outside the domain of an operation (e.g. log of a non-positive value)."""


class MultiplicityError(SpdsrError):
    """The eigen-decomposition fiber is infinite (repeated eigenvalues).

    ``partition`` carries the eigenvalue-equality blocks (0-based indices).
    """

    def __init__(self, message: str, partition=None):
        super().__init__(message)
        self.partition = partition


class ConvergenceError(SpdsrError, RuntimeError):
    """An iterative solver hit its iteration cap; ``last`` holds the final iterate."""

    def __init__(self, message: str, last=None):
        super().__init__(message)
        self.last = last


class AmbiguousAxis(SpdsrError):
    """The principal axis of a tensor is undefined (top eigenvalue not simple)."""
