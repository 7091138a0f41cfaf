"""Finitary operations on {0, ..., k-1} stored as dense value tables.

Points are plain tuples of ints.  Tables are indexed big-endian in base k,
so the first argument is the most significant digit and lexicographic
table order agrees with lexicographic point order.  Variable indices in
public results (essential variables, triples) are 1-based.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .config import LIMITS, InputError, InternalError

Point = tuple[int, ...]

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _check_shape(k: int, arity: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise InputError(f"base-set size must be an integer >= 2, got {k!r}")
    if k > LIMITS.max_k:
        raise InputError(f"base-set size {k} exceeds the configured ceiling {LIMITS.max_k}")
    if not isinstance(arity, (int, np.integer)) or arity < 1:
        raise InputError(f"arity must be a positive integer, got {arity!r}")
    if k**arity > LIMITS.max_table:
        raise InputError(
            f"table size {k}^{arity} exceeds the configured ceiling {LIMITS.max_table}"
        )


@dataclass(frozen=True)
class Operation:
    """An ``arity``-ary operation on ``{0, ..., k-1}``.

    ``table`` may be given as any sequence of ints; it is stored as bytes
    (values are < 256 because k is bounded).
    """

    k: int
    arity: int
    table: bytes

    def __post_init__(self):
        _check_shape(self.k, self.arity)
        table = self.table
        if not isinstance(table, bytes):
            if isinstance(table, np.ndarray):
                values = table.astype(np.int64).ravel()
            else:
                values = np.asarray(list(table), dtype=np.int64)
            if values.size and (values.min() < 0 or values.max() >= self.k):
                raise InputError(f"table entries must lie in 0..{self.k - 1}")
            table = values.astype(np.uint8).tobytes()
            object.__setattr__(self, "table", table)
        elif table and max(table) >= self.k:
            raise InputError(f"table entries must lie in 0..{self.k - 1}")
        if len(table) != self.k**self.arity:
            raise InputError(
                f"table length {len(table)} != {self.k}^{self.arity} = {self.k**self.arity}"
            )

    # -- constructors ---------------------------------------------------

    @classmethod
    def projection(cls, k: int, n: int, i: int) -> Operation:
        """The n-ary i-th projection (1-based i)."""
        if not 1 <= i <= n:
            raise InputError(f"projection index {i} out of range 1..{n}")
        _check_shape(k, n)
        grid = np.indices((k,) * n).reshape(n, -1)
        return cls(k, n, grid[i - 1])

    @classmethod
    def constant(cls, k: int, n: int, a: int) -> Operation:
        if not 0 <= a < k:
            raise InputError(f"constant {a} not in 0..{k - 1}")
        _check_shape(k, n)
        return cls(k, n, bytes([a]) * k**n)

    @classmethod
    def unary(cls, k: int, values: Sequence[int]) -> Operation:
        return cls(k, 1, values)

    @classmethod
    def from_function(cls, k: int, n: int, fn) -> Operation:
        """Tabulate ``fn(*point)`` over all points in index order."""
        _check_shape(k, n)
        return cls(k, n, [fn(*p) for p in itertools.product(range(k), repeat=n)])

    # -- views ----------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.table)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.frombuffer(self.table, dtype=np.uint8)
        arr.flags.writeable = False
        return arr

    def __call__(self, *point: int) -> int:
        return eval_at(self, point)

    def __repr__(self) -> str:
        if self.size <= 64:
            return f"Operation({to_text(self)!r})"
        return f"Operation(k={self.k}, n={self.arity}, table=<{self.size} entries>)"

    def __lt__(self, other: Operation) -> bool:
        return sort_key(self) < sort_key(other)


def sort_key(f: Operation) -> tuple[int, int, bytes]:
    """Canonical order: by k, then arity, then table (= serialized order)."""
    return (f.k, f.arity, f.table)


# -- points ---------------------------------------------------------------


def index(point: Sequence[int], k: int) -> int:
    idx = 0
    for a in point:
        idx = idx * k + a
    return idx


def point(idx: int, k: int, n: int) -> Point:
    coords = [0] * n
    for pos in range(n - 1, -1, -1):
        idx, coords[pos] = divmod(idx, k)
    if idx:
        raise InputError("index out of range for the given arity")
    return tuple(coords)


def points(k: int, n: int) -> Iterator[Point]:
    return itertools.product(range(k), repeat=n)


def point_grid(k: int, n: int) -> np.ndarray:
    """Array of shape (k**n, n): row j is point(j)."""
    return np.indices((k,) * n).reshape(n, -1).T


# -- evaluation and composition -----------------------------------------------


def eval_at(f: Operation, p: Sequence[int]) -> int:
    if len(p) != f.arity:
        raise InputError(f"point has {len(p)} coordinates, operation has arity {f.arity}")
    for a in p:
        if not 0 <= a < f.k:
            raise InputError(f"coordinate {a} out of range 0..{f.k - 1}")
    return f.table[index(p, f.k)]


def compose(outer: Operation, inners: Sequence[Operation]) -> Operation:
    """``outer(inners[0], ..., inners[m-1])`` as an operation of the inners' arity."""
    if len(inners) != outer.arity:
        raise InputError(f"outer has arity {outer.arity} but {len(inners)} inner functions given")
    if not inners:
        raise InputError("composition needs at least one inner function")
    k, n = inners[0].k, inners[0].arity
    for h in inners:
        if h.k != k or h.arity != n:
            raise InputError("inner functions must share base set and arity")
    if outer.k != k:
        raise InputError("outer and inner functions must share the base set")
    codes = np.zeros(k**n, dtype=np.int64)
    for h in inners:
        codes = codes * k + h.array
    return Operation(k, n, outer.array[codes])


# -- structure ---------------------------------------------------------------


def essential_variables(f: Operation) -> frozenset[int]:
    """1-based indices of the variables ``f`` depends on."""
    k, n = f.k, f.arity
    arr = f.array.reshape((k,) * n)
    ess = set()
    for axis in range(n):
        first = np.take(arr, [0], axis=axis)
        if np.any(arr != first):
            ess.add(axis + 1)
    return frozenset(ess)


def essential_arity(f: Operation) -> int:
    return len(essential_variables(f))


def collapse_inessential(f: Operation) -> Operation:
    """Delete inessential variables; constants collapse to arity 1."""
    ess = sorted(essential_variables(f))
    if not ess:
        return Operation.constant(f.k, 1, f.table[0])
    arr = f.array.reshape((f.k,) * f.arity)
    sl = tuple(slice(None) if axis + 1 in ess else 0 for axis in range(f.arity))
    return Operation(f.k, len(ess), arr[sl].ravel())


def range_of(f: Operation) -> frozenset[int]:
    return frozenset(f.table)


@dataclass(frozen=True)
class KernelPartition:
    """Blocks of KER f, one per attained value, in ascending value order."""

    values: tuple[int, ...]
    blocks: tuple[tuple[Point, ...], ...]

    def block_of(self, value: int) -> tuple[Point, ...]:
        return self.blocks[self.values.index(value)]


def kernel_of(f: Operation) -> KernelPartition:
    buckets: dict[int, list[Point]] = {}
    for idx, p in enumerate(points(f.k, f.arity)):
        buckets.setdefault(f.table[idx], []).append(p)
    values = tuple(sorted(buckets))
    return KernelPartition(values, tuple(tuple(buckets[v]) for v in values))


@dataclass(frozen=True)
class EssentialTriple:
    alpha: int
    beta: int
    gamma: int
    a: Point
    b: Point
    c: Point
    i: int  # 1-based coordinate where a and b differ

    def is_valid_for(self, f: Operation) -> bool:
        i = self.i - 1
        n = f.arity
        return (
            len({self.alpha, self.beta, self.gamma}) == 3
            and all(self.a[j] == self.b[j] for j in range(n) if j != i)
            and self.a[i] == self.c[i]
            and f(*self.a) == self.alpha
            and f(*self.b) == self.beta
            and f(*self.c) == self.gamma
        )


def find_essential_triple(f: Operation) -> EssentialTriple | None:
    """Least essential triple in (i, a, b, c) index order, or None."""
    if len(set(f.table)) < 3:
        return None
    k, n = f.k, f.arity
    table = f.table
    pts = list(points(k, n))
    weights = [k ** (n - 1 - i) for i in range(n)]
    # least point index per (axis, coordinate value, function value)
    hyper: list[list[dict[int, int]]] = [[{} for _ in range(k)] for _ in range(n)]
    for idx, p in enumerate(pts):
        v = table[idx]
        for i in range(n):
            hyper[i][p[i]].setdefault(v, idx)
    for i in range(n):
        w = weights[i]
        for ia, pa in enumerate(pts):
            alpha = table[ia]
            plane = hyper[i][pa[i]]
            base = ia - pa[i] * w
            for x in range(k):
                ib = base + x * w
                beta = table[ib]
                if beta == alpha:
                    continue
                ic = min(
                    (j for v, j in plane.items() if v != alpha and v != beta),
                    default=None,
                )
                if ic is None:
                    continue
                return EssentialTriple(alpha, beta, table[ic], pa, pts[ib], pts[ic], i + 1)
    return None


def kernel_transversal_small_projections(f: Operation) -> dict[int, Point]:
    """A transversal of KER f, as value -> point, whose coordinate projections
    each have fewer than ``|range f|`` elements.

    Seeds with an essential triple and extends greedily, preferring points
    that reuse coordinate values already present; backtracks if the final
    projection check fails.
    """
    r = len(range_of(f))
    if len(essential_variables(f)) < 2 or r < 3:
        raise InputError("need at least two essential variables and at least three values")
    triple = find_essential_triple(f)
    if triple is None:
        raise InternalError("no essential triple found for an operation with two essential variables and three values")
    chosen = {triple.alpha: triple.a, triple.beta: triple.b, triple.gamma: triple.c}
    kernel = kernel_of(f)
    rest = [v for v in kernel.values if v not in chosen]
    n = f.arity

    def projections(pts: Iterable[Point]) -> list[set[int]]:
        proj = [set() for _ in range(n)]
        for p in pts:
            for i in range(n):
                proj[i].add(p[i])
        return proj

    def extend(pos: int) -> bool:
        if pos == len(rest):
            return all(len(s) < r for s in projections(chosen.values()))
        proj = projections(chosen.values())
        block = kernel.block_of(rest[pos])
        ranked = sorted(block, key=lambda p: sum(p[i] not in proj[i] for i in range(n)))
        for p in ranked:
            chosen[rest[pos]] = p
            if extend(pos + 1):
                return True
            del chosen[rest[pos]]
        return False

    if not extend(0):
        raise InternalError("exhausted transversal extensions without meeting the projection bound")
    return dict(sorted(chosen.items()))


# -- serialization -------------------------------------------------------------


def to_text(f: Operation) -> str:
    digits = "".join(_DIGITS[v] for v in f.table)
    return f"FN k={f.k} n={f.arity} t={digits}"


def parse_text(text: str) -> Operation:
    parts = text.strip().split()
    if len(parts) != 4 or parts[0] != "FN":
        raise InputError(f"expected 'FN k=<k> n=<n> t=<digits>', got {text!r}")
    fields = {}
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep or key not in ("k", "n", "t") or key in fields:
            raise InputError(f"malformed field {part!r}")
        fields[key] = value
    if set(fields) != {"k", "n", "t"}:
        raise InputError("missing one of the fields k, n, t")
    try:
        k, n = int(fields["k"]), int(fields["n"])
    except ValueError as exc:
        raise InputError("k and n must be integers") from exc
    digits = fields["t"]
    try:
        values = [_DIGITS.index(ch) for ch in digits]
    except ValueError as exc:
        raise InputError(f"invalid digit in table {digits!r}") from exc
    return Operation(k, n, values)


def to_json(f: Operation) -> dict:
    return {"k": f.k, "n": f.arity, "table": list(f.table)}


def from_json(obj: Mapping | str) -> Operation:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        return Operation(int(obj["k"]), int(obj["n"]), [int(v) for v in obj["table"]])
    except (KeyError, TypeError) as exc:
        raise InputError(f"expected {{'k', 'n', 'table'}}, got {obj!r}") from exc


def parse_operation(text: str) -> Operation:
    """Accept either the ``FN ...`` text form or the JSON form."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return from_json(json.loads(stripped))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON operation: {exc}") from exc
    return parse_text(stripped)
