"""The projection clone J and the Burle chain B_0 < B_1 < ... < B_k."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

import numpy as np

from .config import LIMITS, CapacityError, InputError
from .finops import Operation, essential_variables, point_grid, range_of
from .quasilinear import iter_standard_forms, from_standard_form, standard_form


@dataclass(frozen=True, order=True)
class CloneId:
    """``kind`` is ``"J"`` (projections) or ``"B"`` (Burle clone B_index)."""

    kind: str
    index: int = 0

    def __post_init__(self):
        if self.kind not in ("J", "B"):
            raise InputError(f"unknown clone kind {self.kind!r}")
        if self.kind == "B" and self.index < 0:
            raise InputError("Burle clone index must be >= 0")

    @classmethod
    def parse(cls, name: str) -> CloneId:
        s = name.strip().upper()
        if s == "J":
            return cls("J")
        if s.startswith("B") and s[1:].isdigit():
            return cls("B", int(s[1:]))
        raise InputError(f"unknown clone name {name!r}; expected J or B0..Bk")

    def validate(self, k: int) -> CloneId:
        if self.kind == "B" and self.index > k:
            raise InputError(f"B{self.index} is undefined on a {k}-element set (max B{k})")
        return self

    def is_top(self, k: int) -> bool:
        return self.kind == "B" and self.index == k

    def is_maximal(self, k: int) -> bool:
        """B_{k-1}: the unique maximal clone containing all unary operations."""
        return self.kind == "B" and self.index == k - 1

    def __str__(self) -> str:
        return "J" if self.kind == "J" else f"B{self.index}"


J = CloneId("J")


def B(i: int) -> CloneId:
    return CloneId("B", i)


def is_essentially_at_most_unary(f: Operation) -> bool:
    return len(essential_variables(f)) <= 1


def is_projection(f: Operation) -> bool:
    ess = essential_variables(f)
    if len(ess) != 1:
        return False
    (i,) = ess
    return f == Operation.projection(f.k, f.arity, i)


def is_quasilinear(f: Operation) -> bool:
    """Constants count as quasilinear (g constant)."""
    return len(range_of(f)) == 1 or standard_form(f) is not None


def clone_membership(f: Operation, c: CloneId) -> bool:
    c.validate(f.k)
    if c.kind == "J":
        return is_projection(f)
    if c.index == f.k:
        return True
    if is_essentially_at_most_unary(f):
        return True
    if c.index == 0:
        return False
    if c.index == 1:
        return standard_form(f) is not None
    return len(range_of(f)) <= c.index


def least_burle_clone(f: Operation) -> CloneId:
    for i in range(f.k + 1):
        if clone_membership(f, B(i)):
            return B(i)
    raise AssertionError("unreachable: B_k contains every operation")


# -- counting -------------------------------------------------------------------


def _surjections(size: int, target: int) -> int:
    return sum((-1) ** j * comb(target, j) * (target - j) ** size for j in range(target + 1))


def clone_size(k: int, n: int, c: CloneId) -> int:
    """Exact |C^(n)| without enumerating."""
    c.validate(k)
    N = k**n
    if c.kind == "J":
        return n
    if c.index == k:
        return k**N
    unary = k + n * (k**k - k)
    if c.index == 0:
        return unary
    if c.index == 1:
        per_var = 2 ** (k - 1) - 1
        wide = sum(comb(n, t) * per_var**t for t in range(2, n + 1)) * k * (k - 1)
        return unary + wide
    i = c.index
    bounded = sum(comb(k, s) * _surjections(N, s) for s in range(1, i + 1))
    overlap = k + n * sum(comb(k, s) * _surjections(k, s) for s in range(2, i + 1))
    return unary + bounded - overlap


# -- enumeration ------------------------------------------------------------------


def _unary_tables(k: int, n: int) -> set[bytes]:
    grid = point_grid(k, n)
    tables = {bytes([a]) * k**n for a in range(k)}
    for lam in itertools.product(range(k), repeat=k):
        if len(set(lam)) == 1:
            continue
        lam_arr = np.asarray(lam, dtype=np.uint8)
        for i in range(n):
            tables.add(lam_arr[grid[:, i]].tobytes())
    return tables


def _clone_tables(k: int, n: int, c: CloneId) -> list[bytes]:
    N = k**n
    if c.kind == "J":
        return sorted(Operation.projection(k, n, i).table for i in range(1, n + 1))
    if c.index == k:
        return [bytes(t) for t in itertools.product(range(k), repeat=N)]
    tables = _unary_tables(k, n)
    if c.index == 1:
        for form in iter_standard_forms(k, n):
            if sum(1 for hi in form.h if any(hi)) >= 2:
                tables.add(from_standard_form(form).table)
    elif c.index >= 2:
        for subset in itertools.combinations(range(k), c.index):
            tables.update(bytes(t) for t in itertools.product(subset, repeat=N))
    return sorted(tables)


def _guard(k: int, n: int, c: CloneId, ceiling: int | None) -> int:
    limit = LIMITS.enumeration if ceiling is None else ceiling
    size = clone_size(k, n, c)
    if size > limit:
        raise CapacityError(
            f"|{c}^({n})| = {size} on k={k} exceeds the enumeration ceiling {limit}", limit
        )
    return size


def enumerate_clone(k: int, n: int, c: CloneId, ceiling: int | None = None) -> Iterator[Operation]:
    """Every member of C^(n), once each, in ascending table order."""
    c.validate(k)
    _guard(k, n, c, ceiling)
    for t in _clone_tables(k, n, c):
        yield Operation(k, n, t)


@lru_cache(maxsize=64)
def _pool_cached(k: int, n: int, c: CloneId) -> np.ndarray:
    tables = _clone_tables(k, n, c)
    arr = np.frombuffer(b"".join(tables), dtype=np.uint8).reshape(len(tables), k**n)
    arr.flags.writeable = False
    return arr


def clone_pool(k: int, n: int, c: CloneId, ceiling: int | None = None) -> np.ndarray:
    """C^(n) as a read-only (members x k**n) uint8 array in canonical order."""
    c.validate(k)
    _guard(k, n, c, ceiling)
    return _pool_cached(k, n, c)
