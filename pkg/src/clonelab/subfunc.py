"""Deciding f <=_C g: is f = g(h_1, ..., h_m) for some h_i in C?

Answers are either a witness (checked by recomposition before being
returned) or a certified "no".  When a search would exceed its ceiling a
CapacityError is raised; an unknown answer is never reported as "no".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import log

from . import _search
from .clones import B, CloneId, clone_membership, clone_pool, clone_size
from .config import LIMITS, InputError, InternalError
from .finops import (
    Operation,
    compose,
    essential_variables,
    kernel_transversal_small_projections,
    point,
    range_of,
)

STRATEGIES = ("auto", "enumerate", "csp")


@dataclass(frozen=True)
class Decision:
    answer: bool
    witness: tuple[Operation, ...] | None
    strategy: str
    nodes_explored: int = 0
    details: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.answer


class Comparison(enum.Enum):
    EQUIVALENT = "equivalent"
    STRICTLY_BELOW = "strictly_below"
    STRICTLY_ABOVE = "strictly_above"
    INCOMPARABLE = "incomparable"


# -- constructive witnesses ---------------------------------------------------------------


def _least_preimages(g: Operation) -> dict[int, tuple[int, ...]]:
    out: dict[int, tuple[int, ...]] = {}
    for idx in range(g.size):
        v = g.table[idx]
        if v not in out:
            out[v] = point(idx, g.k, g.arity)
    return out


def _contains_all_unary(c: CloneId) -> bool:
    return c.kind == "B"


def equivalence_witness_same_range(f: Operation, c: CloneId) -> tuple[Operation, tuple[Operation, ...]]:
    """Return (xi, (g_1, ..., g_n)) with xi unary, range xi = range f, xi
    fixing range f pointwise, and f(g_1, ..., g_n) = xi.  Together with
    xi(f) = f this shows f and xi are C-equivalent."""
    c.validate(f.k)
    if not _contains_all_unary(c):
        raise InputError(f"{c} does not contain all unary operations")
    if not clone_membership(f, c):
        raise InputError(f"operation is not a member of {c}")
    k, n = f.k, f.arity
    S = sorted(range_of(f))
    xi = Operation.unary(k, [a if a in S else S[0] for a in range(k)])
    u = _least_preimages(f)
    inner = tuple(Operation.unary(k, [u[xi.table[a]][i] for a in range(k)]) for i in range(n))
    if compose(f, inner) != xi or compose(xi, [f]) != f:
        raise InternalError("same-range equivalence witness failed to recompose")
    return xi, inner


def _same_range_witness(f: Operation, g: Operation) -> tuple[Operation, ...]:
    """h = lambda o f with lambda(b) = least g-preimage of b, for range f <= range g."""
    u = _least_preimages(g)
    rf = range_of(f)
    fill = min(rf)
    return tuple(
        compose(Operation.unary(f.k, [u[b if b in rf else fill][j] for b in range(f.k)]), [f])
        for j in range(g.arity)
    )


def top_class_witness(f: Operation, g: Operation) -> tuple[Operation, ...]:
    """Inner functions in B_{k-1} with f = g(h), for f, g outside B_{k-1}.

    Uses a transversal {d_0, ..., d_{k-1}} of KER g with small coordinate
    projections and sets h(a) = d_{f(a)}.
    """
    k = f.k
    if g.k != k:
        raise InputError("f and g must share the base set")
    if k < 3:
        raise InputError("the top-class construction needs k >= 3")
    top = B(k - 1)
    if clone_membership(f, top) or clone_membership(g, top):
        raise InputError(f"both operations must lie outside {top}")
    d = kernel_transversal_small_projections(g)
    n, m = f.arity, g.arity
    h = tuple(Operation(k, n, [d[v][j] for v in f.table]) for j in range(m))
    if compose(g, h) != f or not all(clone_membership(hj, top) for hj in h):
        raise InternalError("top-class witness failed verification")
    return h


# -- decision --------------------------------------------------------------------------------


def _check_decision(f: Operation, g: Operation, c: CloneId, d: Decision) -> Decision:
    if not d.answer:
        return d
    w = d.witness
    if w is None or len(w) != g.arity:
        raise InternalError("yes-decision without a witness of the right length")
    if any(h.arity != f.arity for h in w):
        raise InternalError("witness has the wrong arity")
    if compose(g, w) != f:
        raise InternalError(f"witness from strategy {d.strategy} does not recompose")
    if not all(clone_membership(h, c) for h in w):
        raise InternalError(f"witness from strategy {d.strategy} leaves {c}")
    if not range_of(f) <= range_of(g):
        raise InternalError("range monotonicity violated")
    if c == B(0) and len(essential_variables(f)) > len(essential_variables(g)):
        raise InternalError("essential arity grew under a B0-subfunction")
    return d


def _fast_path(f: Operation, g: Operation, c: CloneId) -> Decision | None:
    """Structural answers for B_k and (k >= 3) B_{k-1}."""
    k = f.k
    if c.is_top(k):
        if range_of(f) <= range_of(g):
            return Decision(True, _same_range_witness(f, g), "fast:Bk")
        return Decision(False, None, "fast:Bk")
    if c.is_maximal(k) and k >= 3:
        f_in, g_in = clone_membership(f, c), clone_membership(g, c)
        if not f_in:
            if g_in:
                return Decision(False, None, "fast:Bk-1")
            return Decision(True, top_class_witness(f, g), "fast:Bk-1")
        if range_of(f) <= range_of(g):
            return Decision(True, _same_range_witness(f, g), "fast:Bk-1")
        return Decision(False, None, "fast:Bk-1")
    return None


def _shortcut(f: Operation, g: Operation, c: CloneId) -> Decision | None:
    """Sound answers valid for every clone that contains all unary operations."""
    if not range_of(f) <= range_of(g):
        return Decision(False, None, "fast:range")
    if not _contains_all_unary(c):
        return None
    f_in = clone_membership(f, c)
    if f_in:
        return Decision(True, _same_range_witness(f, g), "fast:same-range")
    if clone_membership(g, c):
        return Decision(False, None, "fast:closure")
    return None


def _enumerate(f: Operation, g: Operation, c: CloneId, ceiling: int | None) -> Decision:
    pool = clone_pool(f.k, f.arity, c, ceiling=ceiling)
    found, nodes = _search.enumerate_search(f, g, pool, ceiling=ceiling)
    if found is None:
        return Decision(False, None, "enumerate", nodes, {"pool": len(pool)})
    witness = tuple(Operation(f.k, f.arity, pool[i]) for i in found)
    return Decision(True, witness, "enumerate", nodes, {"pool": len(pool)})


def _coord_mode(c: CloneId, k: int) -> _search.CoordMode:
    if c.kind == "J":
        return _search.CoordMode(proj=True)
    if c.index == k:
        return _search.CoordMode(free=True)
    if c.index == 0:
        return _search.CoordMode(unary=True)
    if c.index == 1:
        return _search.CoordMode(unary=True, linear=True)
    return _search.CoordMode(unary=True, budget=c.index)


def _csp(f: Operation, g: Operation, c: CloneId, ceiling: int | None) -> Decision:
    k, n = f.k, f.arity
    counter = _search._Counter(ceiling)
    details: dict = {}
    if c.kind == "B" and 2 <= c.index < k:
        tables, refuted, forced = _search.split_search(f, g, c.index, counter)
        details["forced_unary"] = [j + 1 for j in forced]
        details["refuted_splits"] = [[j + 1 for j in u] for u in refuted]
        strategy = "csp:split"
    else:
        modes = [_coord_mode(c, k)] * g.arity
        tables = _search.point_search(f, g, modes, counter=counter)
        strategy = "csp"
    if tables is None:
        return Decision(False, None, strategy, counter.nodes, details)
    witness = tuple(Operation(k, n, t) for t in tables)
    return Decision(True, witness, strategy, counter.nodes, details)


def decide_subfunction(f: Operation, g: Operation, c: CloneId, strategy: str = "auto",
                       ceiling: int | None = None) -> Decision:
    """Decide whether f = g(h_1, ..., h_m) with every h_i in c.

    ``strategy`` is ``auto`` (structural fast paths, then enumerate when
    |C^(n)|^m fits the ceiling, else csp), ``enumerate`` or ``csp``.
    """
    if f.k != g.k:
        raise InputError("f and g must share the base set")
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    c.validate(f.k)
    limit = LIMITS.enumeration if ceiling is None else ceiling
    if strategy == "auto":
        d = _fast_path(f, g, c)
        if d is None:
            d = _shortcut(f, g, c)
        if d is None:
            size = clone_size(f.k, f.arity, c)
            if size <= limit and g.arity * log(max(size, 1)) <= log(limit):
                d = _enumerate(f, g, c, ceiling)
            else:
                d = _csp(f, g, c, ceiling)
    elif strategy == "enumerate":
        d = _enumerate(f, g, c, ceiling)
    else:
        d = _csp(f, g, c, ceiling)
    return _check_decision(f, g, c, d)


def compare(f: Operation, g: Operation, c: CloneId, strategy: str = "auto",
            ceiling: int | None = None) -> Comparison:
    below = decide_subfunction(f, g, c, strategy, ceiling).answer
    above = decide_subfunction(g, f, c, strategy, ceiling).answer
    if below and above:
        return Comparison.EQUIVALENT
    if below:
        return Comparison.STRICTLY_BELOW
    if above:
        return Comparison.STRICTLY_ABOVE
    return Comparison.INCOMPARABLE


def are_equivalent(f: Operation, g: Operation, c: CloneId, strategy: str = "auto",
                   ceiling: int | None = None) -> bool:
    if not decide_subfunction(f, g, c, strategy, ceiling).answer:
        return False
    return decide_subfunction(g, f, c, strategy, ceiling).answer
