"""Errors and configurable resource ceilings."""

from __future__ import annotations

import os
from dataclasses import dataclass


class CloneLabError(Exception):
    """Base class for all library errors."""


class InputError(CloneLabError, ValueError):
    """Malformed or out-of-contract input."""


class CapacityError(CloneLabError):
    """A configured ceiling was exceeded; the answer is unknown, not negative."""

    def __init__(self, message: str, bound: int | None = None):
        super().__init__(message)
        self.bound = bound


class InternalError(CloneLabError, AssertionError):
    """A postcondition failed; indicates a bug or a false mathematical claim."""


@dataclass
class Limits:
    max_k: int = 8
    max_table: int = 2**24
    enumeration: int = 10**7
    nodes: int = 10**7
    gl_dimension: int = 4
    antichain_brute_force: int = 20


def _from_env() -> Limits:
    limits = Limits()
    raw = os.environ.get("CLONELAB_CEILING")
    if raw:
        try:
            value = int(float(raw))
        except ValueError as exc:
            raise InputError(f"CLONELAB_CEILING must be an integer, got {raw!r}") from exc
        limits.enumeration = value
        limits.nodes = value
    return limits


LIMITS = _from_env()
