import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from clonelab.finops import Operation

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def operations(draw, k=None, arity=None, max_k=3, max_arity=2):
    k = k if k is not None else draw(st.integers(2, max_k))
    n = arity if arity is not None else draw(st.integers(1, max_arity))
    values = draw(st.lists(st.integers(0, k - 1), min_size=1, max_size=k).map(sorted))
    table = draw(st.lists(st.sampled_from(values), min_size=k**n, max_size=k**n))
    return Operation(k, n, table)


def all_operations(k, n):
    return [Operation(k, n, t) for t in itertools.product(range(k), repeat=k**n)]


def brute_eval(f, p):
    """Table lookup by explicit big-endian index, independent of finops helpers."""
    idx = 0
    for a in p:
        idx = idx * f.k + a
    return f.table[idx]


def brute_compose(outer, inners):
    k, n = inners[0].k, inners[0].arity
    table = []
    for p in itertools.product(range(k), repeat=n):
        table.append(brute_eval(outer, [brute_eval(h, p) for h in inners]))
    return Operation(k, n, table)


def brute_essential(f):
    k, n = f.k, f.arity
    ess = set()
    for p in itertools.product(range(k), repeat=n):
        for i in range(n):
            for b in range(k):
                q = p[:i] + (b,) + p[i + 1:]
                if brute_eval(f, p) != brute_eval(f, q):
                    ess.add(i + 1)
    return ess


def k2_member(f, i):
    # independent membership for k=2: B0 = at most one essential variable,
    # B1 adds the affine functions, B2 is everything
    if i == 2 or len(brute_essential(f)) <= 1:
        return True
    if i == 0:
        return False
    n = f.arity
    for coeffs in itertools.product((0, 1), repeat=n + 1):
        table = [(sum(c * x for c, x in zip(coeffs, p)) + coeffs[-1]) % 2
                 for p in itertools.product((0, 1), repeat=n)]
        if list(f.table) == table:
            return True
    return False


def brute_reachable(g, n, i):
    pool = [h for h in all_operations(2, n) if k2_member(h, i)]
    return {brute_compose(g, list(hs)).table for hs in itertools.product(pool, repeat=g.arity)}


@pytest.fixture
def AND():
    return Operation(2, 2, [0, 0, 0, 1])


@pytest.fixture
def OR():
    return Operation(2, 2, [0, 1, 1, 1])


@pytest.fixture
def XOR():
    return Operation(2, 2, [0, 1, 1, 0])
