"""Quotient posets O_A^(<=n) / C-equivalence and their chain/antichain numbers."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism

from .clones import CloneId, clone_membership
from .config import LIMITS, CapacityError, InputError, InternalError
from .finops import Operation, range_of, to_text
from .subfunc import are_equivalent, decide_subfunction

TOP = "TOP"


@dataclass(frozen=True)
class PosetClass:
    representative: Operation
    range: frozenset[int]
    label: frozenset[int] | str | None = None
    size: int | None = None

    def name(self) -> str:
        if self.label == TOP:
            return TOP
        if self.label is not None:
            return "{" + ",".join(map(str, sorted(self.label))) + "}"
        return to_text(self.representative)


@dataclass
class QuotientPoset:
    """``order[i, j]`` is True when class i lies below (or equals) class j."""

    k: int
    clone: CloneId
    max_arity: int
    classes: list[PosetClass]
    order: np.ndarray
    symbolic: bool = False
    members: list[list[Operation]] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.classes)

    def strictly_below(self, i: int, j: int) -> bool:
        return i != j and bool(self.order[i, j])

    def covers(self) -> list[tuple[int, int]]:
        n = len(self)
        out = []
        for i, j in itertools.product(range(n), repeat=2):
            if self.strictly_below(i, j) and not any(
                self.strictly_below(i, m) and self.strictly_below(m, j) for m in range(n)
            ):
                out.append((i, j))
        return out

    def dag(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self)))
        g.add_edges_from((i, j) for i in range(len(self)) for j in range(len(self))
                         if self.strictly_below(i, j))
        return g

    def index_of_label(self, label) -> int:
        for i, c in enumerate(self.classes):
            if c.label == label:
                return i
        raise KeyError(label)


# -- construction -----------------------------------------------------------------------


def _range_labelled(k: int, c: CloneId) -> bool:
    return c.is_top(k) or (c.is_maximal(k) and k >= 3)


def _range_representative(k: int, S: frozenset[int]) -> Operation:
    """Least unary table with range S."""
    s = sorted(S)
    return Operation.unary(k, [s[0]] * (k - len(s) + 1) + s[1:])


def _top_representative(k: int) -> Operation:
    """A surjective, essentially binary operation (outside B_{k-1})."""
    return Operation(k, 2, [0] * (k * k - k + 1) + list(range(1, k)))


def _order_matrix(reps: list[Operation], c: CloneId, workers: int) -> np.ndarray:
    n = len(reps)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]

    def decide(pair):
        i, j = pair
        return decide_subfunction(reps[i], reps[j], c).answer

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            answers = list(ex.map(decide, pairs))
    else:
        answers = [decide(p) for p in pairs]
    order = np.eye(n, dtype=bool)
    for (i, j), a in zip(pairs, answers):
        order[i, j] = a
    return order


def _check_poset(p: QuotientPoset) -> None:
    o = p.order
    n = len(p)
    if not o.diagonal().all():
        raise InternalError("order is not reflexive")
    if (o & o.T & ~np.eye(n, dtype=bool)).any():
        raise InternalError("order is not antisymmetric: two classes are equivalent")
    if ((o.astype(np.int64) @ o.astype(np.int64) > 0) & ~o).any():
        raise InternalError("order is not transitive")
    for j, cls in enumerate(p.classes):
        if len(cls.range) == 1 and any(p.strictly_below(i, j) for i in range(n)):
            raise InternalError("a constant class has a strict lower class")


def symbolic_poset(k: int, c: CloneId, workers: int = 1) -> QuotientPoset:
    """Classes C_S for nonempty S, plus a top class for B_{k-1}, built from
    representatives without enumerating operations."""
    c.validate(k)
    if not _range_labelled(k, c):
        raise InputError(f"symbolic construction covers B{k} and (k >= 3) B{k - 1}, not {c}")
    subsets = [frozenset(s) for r in range(1, k + 1) for s in itertools.combinations(range(k), r)]
    classes = [PosetClass(_range_representative(k, S), S, S) for S in subsets]
    if c.is_maximal(k):
        classes.append(PosetClass(_top_representative(k), frozenset(range(k)), TOP))
    order = _order_matrix([cl.representative for cl in classes], c, workers)
    p = QuotientPoset(k, c, 2, classes, order, symbolic=True)
    _check_poset(p)
    return p


def _all_operations(k: int, max_arity: int):
    for n in range(1, max_arity + 1):
        for t in itertools.product(range(k), repeat=k**n):
            yield Operation(k, n, t)


def enumerated_poset(k: int, c: CloneId, max_arity: int, workers: int = 1,
                     keep_members: bool = False) -> QuotientPoset:
    c.validate(k)
    if max_arity < 1:
        raise InputError("max_arity must be >= 1")
    total = sum(k ** (k**n) for n in range(1, max_arity + 1))
    if total > LIMITS.enumeration:
        raise CapacityError(
            f"{total} operations of arity <= {max_arity} on k={k} exceed the ceiling {LIMITS.enumeration}",
            LIMITS.enumeration,
        )
    labelled = _range_labelled(k, c)
    reps: list[Operation] = []
    members: list[list[Operation]] = []
    by_range: dict[frozenset[int], list[int]] = {}
    # canonical order makes the first member of each class its least representative
    for f in _all_operations(k, max_arity):
        rng = range_of(f)
        bucket = by_range.setdefault(rng, [])
        for idx in bucket:
            if are_equivalent(f, reps[idx], c):
                members[idx].append(f)
                break
        else:
            bucket.append(len(reps))
            reps.append(f)
            members.append([f])
    classes = []
    for rep, mem in zip(reps, members):
        label = None
        if labelled:
            label = range_of(rep) if clone_membership(rep, c) else TOP
        classes.append(PosetClass(rep, range_of(rep), label, len(mem)))
    order = _order_matrix(reps, c, workers)
    p = QuotientPoset(k, c, max_arity, classes, order, False, members if keep_members else None)
    _check_poset(p)
    return p


def quotient_poset(k: int, c: CloneId, max_arity: int, symbolic: bool | None = None,
                   workers: int = 1) -> QuotientPoset:
    """``symbolic=None`` enumerates when feasible and falls back to the
    symbolic construction for B_k / B_{k-1}."""
    c.validate(k)
    if symbolic:
        if max_arity < 2:
            raise InputError("the symbolic construction needs max_arity >= 2 (the top class is binary)")
        return symbolic_poset(k, c, workers)
    if symbolic is None and _range_labelled(k, c) and max_arity >= 2:
        try:
            return enumerated_poset(k, c, max_arity, workers)
        except CapacityError:
            return symbolic_poset(k, c, workers)
    return enumerated_poset(k, c, max_arity, workers)


# -- chains and antichains -------------------------------------------------------------------


def max_chain(p: QuotientPoset) -> int:
    """Number of elements in a longest chain."""
    g = p.dag()
    return len(nx.dag_longest_path(g)) if len(p) else 0


def _antichain_brute_force(p: QuotientPoset) -> int:
    n = len(p)
    comparable = [
        sum(1 << j for j in range(n) if j != i and (p.order[i, j] or p.order[j, i]))
        for i in range(n)
    ]
    best = 0

    def grow(candidates: int, size: int):
        nonlocal best
        if candidates == 0:
            best = max(best, size)
            return
        if size + candidates.bit_count() <= best:
            return
        i = candidates.bit_length() - 1
        grow(candidates & ~(1 << i) & ~comparable[i], size + 1)
        grow(candidates & ~(1 << i), size)

    grow((1 << n) - 1, 0)
    return best


def _antichain_dilworth(p: QuotientPoset) -> int:
    n = len(p)
    g = nx.Graph()
    left = [("L", i) for i in range(n)]
    g.add_nodes_from(left, bipartite=0)
    g.add_nodes_from((("R", j) for j in range(n)), bipartite=1)
    g.add_edges_from((("L", i), ("R", j)) for i in range(n) for j in range(n) if p.strictly_below(i, j))
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return n - len(matching) // 2


def max_antichain(p: QuotientPoset, method: str = "auto") -> int:
    """Largest antichain; exhaustive branch and bound for small posets,
    minimum chain cover by bipartite matching otherwise."""
    if len(p) == 0:
        return 0
    if method == "auto":
        method = "brute" if len(p) <= LIMITS.antichain_brute_force else "dilworth"
    if method == "brute":
        return _antichain_brute_force(p)
    if method == "dilworth":
        return _antichain_dilworth(p)
    raise InputError(f"unknown antichain method {method!r}")


# -- shapes ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class PosetShape:
    """``kind`` is ``powerset`` (nonempty subsets of a k-set under inclusion),
    ``powerset_top`` (the same with a new top element) or ``explicit``."""

    kind: str
    k: int = 0
    labels: tuple = ()
    order: tuple[tuple[bool, ...], ...] = ()

    @classmethod
    def powerset_minus_bottom(cls, k: int) -> PosetShape:
        return cls("powerset", k)

    @classmethod
    def powerset_minus_bottom_plus_top(cls, k: int) -> PosetShape:
        return cls("powerset_top", k)

    @classmethod
    def explicit(cls, labels, order) -> PosetShape:
        return cls("explicit", 0, tuple(labels), tuple(tuple(bool(x) for x in row) for row in order))

    @property
    def size(self) -> int:
        if self.kind == "powerset":
            return 2**self.k - 1
        if self.kind == "powerset_top":
            return 2**self.k
        return len(self.labels)

    def elements(self) -> list:
        if self.kind == "explicit":
            return list(self.labels)
        out: list = [frozenset(s) for r in range(1, self.k + 1)
                     for s in itertools.combinations(range(self.k), r)]
        if self.kind == "powerset_top":
            out.append(TOP)
        return out

    def leq(self, x, y) -> bool:
        if self.kind == "explicit":
            return self.order[self.labels.index(x)][self.labels.index(y)]
        if y == TOP:
            return True
        if x == TOP:
            return False
        return x <= y

    def width(self) -> int:
        if self.kind in ("powerset", "powerset_top"):
            return comb(self.k, self.k // 2)
        raise InputError("width is only closed-form for powerset shapes")


@dataclass(frozen=True)
class ShapeMatch:
    matches: bool
    bijection: dict | None = None
    reason: str = ""


def check_shape(p: QuotientPoset, shape: PosetShape) -> ShapeMatch:
    """Order isomorphism test.  Range-labelled classes are matched by
    label identity; otherwise an isomorphism of the strict orders is searched."""
    if len(p) != shape.size:
        return ShapeMatch(False, None, f"element counts differ: {len(p)} != {shape.size}")
    elems = shape.elements()
    if all(c.label is not None for c in p.classes) and shape.kind != "explicit":
        labels = [c.label for c in p.classes]
        if set(labels) != set(elems):
            return ShapeMatch(False, None, "class labels do not match the shape's elements")
        bij = {i: labels[i] for i in range(len(p))}
    else:
        target = nx.DiGraph()
        target.add_nodes_from(range(len(elems)))
        target.add_edges_from((a, b) for a in range(len(elems)) for b in range(len(elems))
                              if a != b and shape.leq(elems[a], elems[b]))
        gm = isomorphism.DiGraphMatcher(p.dag(), target)
        if not gm.is_isomorphic():
            return ShapeMatch(False, None, "no order isomorphism exists")
        bij = {i: elems[j] for i, j in gm.mapping.items()}
    for i, j in itertools.product(range(len(p)), repeat=2):
        if bool(p.order[i, j]) != shape.leq(bij[i], bij[j]):
            return ShapeMatch(False, None, f"order differs at classes {i}, {j}")
    return ShapeMatch(True, bij, "")


def to_dot(p: QuotientPoset) -> str:
    lines = [f'digraph "{p.clone} k={p.k}" {{', "  rankdir=BT;"]
    for i, c in enumerate(p.classes):
        lines.append(f'  n{i} [label="{c.name()}"];')
    for i, j in p.covers():
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"



def same_labelled_poset(p: QuotientPoset, q: QuotientPoset) -> bool:
    """Class-for-class agreement of two range-labelled posets, independent of class order."""
    if any(c.label is None for c in p.classes + q.classes):
        raise InputError("both posets must carry class labels")
    if sorted(map(PosetClass.name, p.classes)) != sorted(map(PosetClass.name, q.classes)):
        return False
    qi = {c.label: i for i, c in enumerate(q.classes)}
    return all(
        bool(p.order[i, j]) == bool(q.order[qi[a.label], qi[b.label]])
        for (i, a), (j, b) in itertools.product(enumerate(p.classes), repeat=2)
    )
