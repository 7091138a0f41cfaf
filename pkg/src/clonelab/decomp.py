"""C-decompositions f = s(phi_1, ..., phi_d) with every phi_i in C.

The C-degree of f is the least such d; among decompositions of that
length, the C-range degree is the least size of the joint range of
(phi_1, ..., phi_d) as a map into A^d.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .clones import CloneId, clone_membership, clone_pool
from .config import LIMITS, CapacityError, InputError, InternalError
from .finops import Operation, compose, essential_arity, range_of


@dataclass(frozen=True)
class Decomposition:
    """``outer`` is None exactly for the empty decomposition of a constant,
    whose value is kept in ``constant``."""

    k: int
    arity: int
    outer: Operation | None
    inners: tuple[Operation, ...]
    range_size: int
    minimal: bool = False
    optimal: bool = False
    constant: int | None = None

    @property
    def d(self) -> int:
        return len(self.inners)

    def recompose(self) -> Operation:
        if self.outer is None:
            return Operation.constant(self.k, self.arity, self.constant)
        return compose(self.outer, self.inners)

    def joint_range(self) -> frozenset[tuple[int, ...]]:
        if not self.inners:
            return frozenset({()})
        return joint_range(self.inners)


@dataclass(frozen=True)
class RetractionMap:
    psi: tuple[Operation, ...]


def _check_inners(f: Operation | None, inners: Sequence[Operation]) -> None:
    if not inners:
        raise InputError("need at least one inner function")
    k, n = inners[0].k, inners[0].arity
    for h in inners:
        if h.k != k or h.arity != n:
            raise InputError("inner functions must share base set and arity")
    if f is not None and (f.k != k or f.arity != n):
        raise InputError("inner functions must share f's base set and arity")


def _codes(tables: np.ndarray, k: int) -> np.ndarray:
    """Joint codes of the rows of ``tables`` (d x k**n), first row most significant."""
    codes = np.zeros(tables.shape[1], dtype=np.int64)
    for row in tables:
        codes = codes * k + row
    return codes


def joint_range(inners: Sequence[Operation]) -> frozenset[tuple[int, ...]]:
    _check_inners(None, inners)
    return frozenset(zip(*(h.table for h in inners)))


def _consistent(codes: np.ndarray, f_arr: np.ndarray, size: int) -> bool:
    seen = np.zeros(size, dtype=np.int64)
    seen[codes] = f_arr
    return bool(np.array_equal(seen[codes], f_arr))


def outer_exists(f: Operation, inners: Sequence[Operation]) -> Operation | None:
    """An outer s with s(inners) = f, or None when the joint kernel of the
    inners does not refine KER f.  Off the reached joint range s is 0."""
    _check_inners(f, inners)
    k, d = f.k, len(inners)
    codes = _codes(np.stack([h.array for h in inners]).astype(np.int64), k)
    f_arr = f.array.astype(np.int64)
    if not _consistent(codes, f_arr, k**d):
        return None
    table = np.zeros(k**d, dtype=np.uint8)
    table[codes] = f_arr
    return Operation(k, d, table)


def is_functionally_independent(inners: Sequence[Operation]) -> bool:
    """No phi_i is a function of the others (joint-kernel refinement test)."""
    if len(inners) < 2:
        raise InputError("functional independence needs at least two functions")
    _check_inners(None, inners)
    for i, h in enumerate(inners):
        rest = [g for j, g in enumerate(inners) if j != i]
        if outer_exists(h, rest) is not None:
            return False
    return True


# -- degree search ------------------------------------------------------------------


def _subset_count_guard(pool_size: int, d: int) -> None:
    count = comb(pool_size, d)
    if count > LIMITS.enumeration:
        raise CapacityError(
            f"{count} candidate {d}-subsets exceed the enumeration ceiling {LIMITS.enumeration}",
            LIMITS.enumeration,
        )


def _working_subsets(f: Operation, pool: np.ndarray, d: int) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Row-index subsets of size d (canonical order) admitting an outer, with their codes."""
    k = f.k
    _subset_count_guard(len(pool), d)
    f_arr = f.array.astype(np.int64)
    pool64 = pool.astype(np.int64)
    size = k**d
    for rows in itertools.combinations(range(len(pool)), d):
        codes = _codes(pool64[list(rows)], k)
        if _consistent(codes, f_arr, size):
            yield rows, codes


def _constant_decomposition(f: Operation) -> Decomposition:
    return Decomposition(f.k, f.arity, None, (), 0, True, True, f.table[0])


def _make(f: Operation, pool: np.ndarray, rows, minimal: bool, optimal: bool) -> Decomposition:
    inners = tuple(Operation(f.k, f.arity, pool[r]) for r in rows)
    outer = outer_exists(f, inners)
    if outer is None:
        raise InternalError("selected inner functions do not admit an outer")
    return Decomposition(f.k, f.arity, outer, inners, len(joint_range(inners)), minimal, optimal)


def _least_working_d(f: Operation, pool: np.ndarray) -> int:
    for d in range(1, essential_arity(f) + 1):
        if next(_working_subsets(f, pool, d), None) is not None:
            return d
    raise InternalError("no decomposition found up to the essential arity")


def degree(f: Operation, c: CloneId, ceiling: int | None = None) -> tuple[int, Decomposition]:
    """deg_C f with the first minimal decomposition in canonical subset order."""
    c.validate(f.k)
    if len(range_of(f)) == 1:
        return 0, _constant_decomposition(f)
    pool = clone_pool(f.k, f.arity, c, ceiling=ceiling)
    d = _least_working_d(f, pool)
    rows, _ = next(_working_subsets(f, pool, d))
    return d, _verified(f, c, _make(f, pool, rows, True, False))


def optimal_decompositions(f: Operation, c: CloneId, ceiling: int | None = None) -> Iterator[Decomposition]:
    """Every minimal decomposition attaining the range degree, in canonical order."""
    c.validate(f.k)
    if len(range_of(f)) == 1:
        yield _constant_decomposition(f)
        return
    pool = clone_pool(f.k, f.arity, c, ceiling=ceiling)
    d = _least_working_d(f, pool)
    found = [(len(np.unique(codes)), rows) for rows, codes in _working_subsets(f, pool, d)]
    best = min(r for r, _ in found)
    for r, rows in found:
        if r == best:
            yield _verified(f, c, _make(f, pool, rows, True, True))


def range_degree(f: Operation, c: CloneId, ceiling: int | None = None) -> tuple[int, Decomposition]:
    """deg^r_C f with its first optimal witness.  Constants report 0."""
    first = next(optimal_decompositions(f, c, ceiling))
    return first.range_size, first


def _verified(f: Operation, c: CloneId, dec: Decomposition) -> Decomposition:
    if dec.recompose() != f:
        raise InternalError("decomposition does not recompose to f")
    if not all(clone_membership(h, c) for h in dec.inners):
        raise InternalError(f"decomposition uses an inner function outside {c}")
    return dec


# -- retractions --------------------------------------------------------------------


def build_retraction(s: Operation, inners: Sequence[Operation]) -> tuple[Operation, RetractionMap]:
    """Replace s by s' = s(psi) which retracts to range phi_1 x ... x range phi_d.

    psi_i(a) = a_i when a_i is in range phi_i, else phi_i(0, ..., 0).
    """
    _check_inners(None, inners)
    d, k = s.arity, s.k
    if len(inners) != d:
        raise InputError(f"outer has arity {d} but {len(inners)} inner functions given")
    psi = []
    for i, phi in enumerate(inners):
        rng = range_of(phi)
        fallback = phi.table[0]
        proj = Operation.projection(k, d, i + 1)
        psi.append(Operation(k, d, [a if a in rng else fallback for a in proj.table]))
    psi_t = tuple(psi)
    s2 = compose(s, psi_t)
    if compose(s2, inners) != compose(s, inners):
        raise InternalError("retraction changed the decomposed function")
    if compose(s2, psi_t) != s2:
        raise InternalError("outer does not retract through psi")
    if any(range_of(p) != range_of(phi) for p, phi in zip(psi_t, inners)):
        raise InternalError("psi_i does not have the range of phi_i")
    return s2, RetractionMap(psi_t)
