"""Explicit function families: a descending chain of B_p-subfunctions for
k >= 4 and the candidate antichains f_n (k >= 4) and g_n (k = 3)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .clones import B, clone_membership
from .config import InputError, InternalError
from .finops import Operation, compose, essential_variables

Vector = tuple[int, ...]

_BASE = {
    3: ((1, 1, 2, 0), (2, 1, 2, 0), (3, 2, 1, 0)),
    4: ((1, 2, 1, 2, 0), (2, 3, 2, 1, 0), (3, 2, 1, 2, 0)),
}


@dataclass(frozen=True)
class ChainVectors:
    n: int
    u: Vector
    v: Vector
    w: Vector

    def special(self) -> frozenset[Vector]:
        return frozenset((self.u, self.v, self.w))


@lru_cache(maxsize=None)
def chain_vectors(n: int) -> ChainVectors:
    """Base cases at n = 3, 4; for n >= 5 the heads are 1, 2, 3 and the
    tails are v_{n-1}, u_{n-1}, u_{n-1} respectively."""
    if n < 3:
        raise InputError(f"chain vectors are defined for n >= 3, got {n}")
    if n in _BASE:
        return ChainVectors(n, *_BASE[n])
    prev = chain_vectors(n - 1)
    return ChainVectors(n, (1,) + prev.v, (2,) + prev.u, (3,) + prev.u)


def _check_chain_args(k: int, n: int) -> None:
    if k < 4:
        raise InputError(f"the chain construction needs k >= 4, got k={k}")
    if n < 3:
        raise InputError(f"the chain construction needs n >= 3, got n={n}")


def chain_function(k: int, n: int) -> Operation:
    """f_n of arity n+1: a on (a, ..., a, 0), 1 on u_n, v_n, w_n, else 0."""
    _check_chain_args(k, n)
    special = chain_vectors(n).special()

    def value(*a: int) -> int:
        if a[-1] == 0 and len(set(a[:-1])) == 1:
            return a[0]
        return 1 if a in special else 0

    return Operation.from_function(k, n + 1, value)


def _step_witness(k: int, n: int, require_last_zero: bool) -> Operation:
    special = chain_vectors(n + 1).special()

    def value(*a: int) -> int:
        diagonal = len(set(a[: n + 1])) == 1 and (a[n + 1] == 0 or not require_last_zero)
        return 0 if a in special or diagonal else 1

    return Operation.from_function(k, n + 2, value)


def chain_step_witness(k: int, n: int) -> Operation:
    """The 0/1-valued g with f_{n+1} = f_n(x_2, ..., x_{n+1}, g).

    g is 0 on u_{n+1}, v_{n+1}, w_{n+1} and on diagonal points
    (a, ..., a, 0); everywhere else it is 1.  The diagonal clause must
    require the last coordinate to be 0: without it g vanishes on
    (a, ..., a, b) with b != 0 and the identity fails there (see
    ``chain_step_witness_unrestricted``).
    """
    _check_chain_args(k, n)
    g = _step_witness(k, n, require_last_zero=True)
    if not clone_membership(g, B(2)):
        raise InternalError("step witness left B2")
    if chain_step_composite(k, n, g) != chain_function(k, n + 1):
        raise InternalError(f"f_{n + 1} != f_{n}(x_2, ..., x_{n + 1}, g) at k={k}")
    return g


def chain_step_witness_unrestricted(k: int, n: int) -> Operation:
    """Variant whose diagonal clause is a_1 = ... = a_{n+1} with any last
    coordinate.  Kept for comparison; it does not satisfy the identity."""
    _check_chain_args(k, n)
    return _step_witness(k, n, require_last_zero=False)


def chain_step_composite(k: int, n: int, g: Operation) -> Operation:
    """f_n(x_2, ..., x_{n+1}, g) as an (n+2)-ary operation."""
    f = chain_function(k, n)
    inner = [Operation.projection(k, n + 2, i) for i in range(2, n + 2)] + [g]
    return compose(f, inner)


def antichain_function(k: int, n: int) -> Operation:
    """f_n: a_1 on the diagonal below k-1, k-1 when exactly n-1 entries are k-1, else 0."""
    if k < 4:
        raise InputError(f"f_n needs k >= 4, got k={k}")
    if n < 2:
        raise InputError(f"f_n needs n >= 2, got n={n}")
    top = k - 1

    def value(*a: int) -> int:
        if len(set(a)) == 1 and a[0] != top:
            return a[0]
        if a.count(top) == n - 1:
            return top
        return 0

    f = Operation.from_function(k, n, value)
    if essential_variables(f) != frozenset(range(1, n + 1)):
        raise InternalError("f_n should depend on every variable")
    return f


def antichain_function_k3(n: int) -> Operation:
    """g_n on {0, 1, 2}: 1 on (1, ..., 1), 2 when one entry is 0 and the rest are 2, else 0."""
    if n < 2:
        raise InputError(f"g_n needs n >= 2, got n={n}")

    def value(*a: int) -> int:
        if all(x == 1 for x in a):
            return 1
        if a.count(2) == n - 1 and a.count(0) == 1:
            return 2
        return 0

    return Operation.from_function(3, n, value)


def g_chain_witness(n: int) -> tuple[Operation, ...]:
    """Inner functions showing g_n = g_{n+1}(x_1, ..., x_n, xi(x_n)) with
    xi = (2, 1, 2); all are essentially unary, so g_n lies B_0-below g_{n+1}."""
    if n < 2:
        raise InputError(f"g_n needs n >= 2, got n={n}")
    inner = [Operation.projection(3, n, i) for i in range(1, n + 1)]
    xi = Operation.unary(3, (2, 1, 2))
    inner.append(compose(xi, [inner[-1]]))
    out = tuple(inner)
    if compose(antichain_function_k3(n + 1), out) != antichain_function_k3(n):
        raise InternalError("g_n chain witness failed to recompose")
    return out


def family_members(kind: str, k: int, n: int) -> Operation:
    if kind == "chain":
        return chain_function(k, n)
    if kind == "antichain":
        return antichain_function_k3(n) if k == 3 else antichain_function(k, n)
    raise InputError(f"unknown family {kind!r}; expected chain or antichain")

