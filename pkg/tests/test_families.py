import itertools

import pytest

from clonelab.clones import B, clone_membership
from clonelab.config import InputError
from clonelab.families import (
    antichain_function,
    antichain_function_k3,
    chain_function,
    chain_step_composite,
    chain_step_witness,
    chain_step_witness_unrestricted,
    chain_vectors,
    family_members,
    g_chain_witness,
)
from clonelab.finops import Operation, compose, essential_variables
from clonelab.subfunc import Comparison, compare, decide_subfunction

from conftest import brute_compose, brute_eval


def test_chain_vector_base_cases():
    v3 = chain_vectors(3)
    assert (v3.u, v3.v, v3.w) == ((1, 1, 2, 0), (2, 1, 2, 0), (3, 2, 1, 0))
    v4 = chain_vectors(4)
    assert (v4.u, v4.v, v4.w) == ((1, 2, 1, 2, 0), (2, 3, 2, 1, 0), (3, 2, 1, 2, 0))
    assert chain_vectors(5).u == (1, 2, 3, 2, 1, 0)
    with pytest.raises(InputError):
        chain_vectors(2)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_chain_vectors_distinct_and_off_diagonal(n):
    cv = chain_vectors(n)
    assert len(cv.special()) == 3
    for vec in cv.special():
        assert len(vec) == n + 1 and vec[-1] == 0 and len(set(vec[:-1])) > 1


def test_chain_function_values():
    f3 = chain_function(4, 3)
    assert f3.arity == 4
    assert f3(1, 1, 2, 0) == 1
    assert f3(3, 3, 3, 0) == 3
    assert f3(0, 1, 2, 3) == 0
    assert f3(3, 3, 3, 1) == 0
    with pytest.raises(InputError):
        chain_function(3, 3)
    with pytest.raises(InputError):
        chain_function(4, 2)


@pytest.mark.parametrize("k,n", [(4, 3), (4, 4), (4, 5), (5, 3)])
def test_chain_step_identity(k, n):
    g = chain_step_witness(k, n)
    assert set(g.table) <= {0, 1}
    assert clone_membership(g, B(2))
    f_n = chain_function(k, n)
    inner = [Operation.projection(k, n + 2, i) for i in range(2, n + 2)] + [g]
    assert brute_compose(f_n, inner) == chain_function(k, n + 1)


def test_chain_step_witness_values():
    g = chain_step_witness(4, 3)
    assert g(*chain_vectors(4).u) == 0
    assert g(2, 2, 2, 2, 0) == 0
    assert g(0, 1, 2, 3, 0) == 1
    # the diagonal clause only fires when the last coordinate is 0
    assert g(1, 1, 1, 1, 2) == 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_unrestricted_diagonal_breaks_identity(n):
    k = 4
    g = chain_step_witness_unrestricted(k, n)
    assert g(*([1] * (n + 2))) == 0
    composite = chain_step_composite(k, n, g)
    target = chain_function(k, n + 1)
    assert composite != target
    bad = (1,) * (n + 1) + (2,)
    assert brute_eval(composite, bad) != brute_eval(target, bad)


def test_antichain_function_values():
    f2 = antichain_function(4, 2)
    assert f2(2, 2) == 2
    assert f2(3, 0) == 3
    assert f2(3, 3) == 0
    for n in (2, 3, 4):
        assert essential_variables(antichain_function(4, n)) == frozenset(range(1, n + 1))
    with pytest.raises(InputError):
        antichain_function(3, 2)


def test_antichain_k3_values():
    g2 = antichain_function_k3(2)
    assert g2(1, 1) == 1
    assert g2(0, 2) == 2
    assert g2(2, 2) == 0
    g3 = antichain_function_k3(3)
    assert [g3(*p) for p in [(1, 1, 1), (2, 0, 2), (0, 2, 2), (0, 0, 2), (2, 2, 2)]] == [1, 2, 2, 0, 0]
    with pytest.raises(InputError):
        antichain_function_k3(1)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_k3_family_collapses_to_chain(n):
    # g_n = g_{n+1}(x_1, ..., x_n, xi(x_n)) with xi = (2, 1, 2), so the family
    # is totally ordered even under the essentially unary clone
    w = g_chain_witness(n)
    assert all(clone_membership(h, B(0)) for h in w)
    assert brute_compose(antichain_function_k3(n + 1), list(w)) == antichain_function_k3(n)


def test_k3_g2_g3_not_incomparable_under_b1():
    assert compare(antichain_function_k3(2), antichain_function_k3(3), B(1)) != Comparison.INCOMPARABLE


def test_k4_f2_f3_incomparable_under_b2():
    f2, f3 = antichain_function(4, 2), antichain_function(4, 3)
    down = decide_subfunction(f2, f3, B(2), "csp")
    up = decide_subfunction(f3, f2, B(2), "csp")
    assert not down.answer and not up.answer
    assert down.strategy == "csp:split"


def test_family_members():
    assert family_members("chain", 4, 3) == chain_function(4, 3)
    assert family_members("antichain", 3, 2) == antichain_function_k3(2)
    assert family_members("antichain", 4, 2) == antichain_function(4, 2)
    with pytest.raises(InputError):
        family_members("lattice", 4, 2)
