"""Exception types shared across the package."""

from __future__ import annotations


class FaultLabError(Exception):
    """Base class for all faultlab errors."""


class ModelValidationError(FaultLabError):
    """A model document or fault location violated the schema.

    `path` points at the offending field, e.g. ``pair_terms[2].i``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class ModeMismatchError(FaultLabError):
    """An operation was applied to a model in the wrong noise mode."""


class ResourceLimitError(FaultLabError):
    """A computation would exceed a hard resource guard."""


class DivergentSumError(FaultLabError):
    """A lattice interaction sum diverges where convergence is required."""
