"""Exception types shared across the package."""

from __future__ import annotations


class EvenDegenError(Exception):
    """Base class for domain errors."""


class InputError(EvenDegenError, ValueError):
    """Malformed or out-of-range input."""


class CapacityError(EvenDegenError):
    """Instance exceeds what an exact method or construction can handle."""


class InfeasibleError(EvenDegenError):
    """A parity constraint cannot be met (e.g. odd parity over an empty group)."""
