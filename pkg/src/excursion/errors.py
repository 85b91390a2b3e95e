"""Exception types raised across the package."""

from __future__ import annotations


class ExcursionError(Exception):
    """Base class for package errors."""


class DomainError(ExcursionError, ValueError):
    """An argument lies outside the domain of the requested law."""


class ConfigurationError(ExcursionError, ValueError):
    """A policy or truncation setting cannot satisfy the request."""


class AccuracyError(ExcursionError, ArithmeticError):
    """A series exhausted its term budget before reaching tolerance.

    The partially summed result is kept on ``partial`` so callers can
    decide whether it is good enough.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
