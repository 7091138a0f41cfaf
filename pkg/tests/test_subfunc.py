import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonelab.clones import B, J, clone_membership
from clonelab.config import CapacityError, InputError
from clonelab.families import antichain_function, antichain_function_k3, g_chain_witness
from clonelab.finops import Operation, collapse_inessential, compose, range_of
from clonelab.subfunc import (
    Comparison,
    are_equivalent,
    compare,
    decide_subfunction,
    equivalence_witness_same_range,
    top_class_witness,
)

from conftest import all_operations, brute_compose, brute_reachable, operations

K2_OPS = all_operations(2, 1) + all_operations(2, 2)


@pytest.mark.parametrize("i", [0, 1, 2])
def test_decide_matches_exhaustive_oracle_k2(i):
    for g in K2_OPS:
        reach = {n: brute_reachable(g, n, i) for n in (1, 2)}
        for f in K2_OPS:
            d = decide_subfunction(f, g, B(i))
            assert d.answer == (f.table in reach[f.arity]), (f, g, i)


def test_decide_examples(OR, AND, XOR):
    d = decide_subfunction(XOR, XOR, J)
    assert d.answer and compose(XOR, d.witness) == XOR
    assert not decide_subfunction(OR, AND, B(0)).answer
    xor3 = Operation.from_function(2, 3, lambda a, b, c: a ^ b ^ c)
    d = decide_subfunction(XOR, xor3, B(1))
    assert d.answer
    assert compose(xor3, d.witness) == XOR
    # x1, x2, c0 is a witness; the engine returns some verified witness
    assert compose(xor3, [Operation.projection(2, 2, 1), Operation.projection(2, 2, 2),
                          Operation.constant(2, 2, 0)]) == XOR


@pytest.mark.parametrize("strategy", ["auto", "enumerate", "csp"])
def test_reflexive_under_every_strategy(strategy):
    for f in K2_OPS:
        for c in (J, B(0), B(1), B(2)):
            assert decide_subfunction(f, f, c, strategy).answer


@pytest.mark.parametrize("i", [0, 1, 2])
def test_transitivity_k2(i):
    ops = K2_OPS
    rel = {(a, b): decide_subfunction(ops[a], ops[b], B(i)).answer
           for a in range(len(ops)) for b in range(len(ops))}
    for a, b, c in itertools.product(range(len(ops)), repeat=3):
        if rel[a, b] and rel[b, c]:
            assert rel[a, c]


def test_monotone_in_clone():
    rng = random.Random(1)
    ops3 = [Operation(3, 2, [rng.randrange(3) for _ in range(9)]) for _ in range(25)]
    for f, g in itertools.product(ops3, repeat=2):
        answers = [decide_subfunction(f, g, B(i)).answer for i in range(4)]
        assert answers == sorted(answers)


def test_engines_agree_k2():
    for f, g in itertools.product(K2_OPS, repeat=2):
        for c in (J, B(0), B(1), B(2)):
            e = decide_subfunction(f, g, c, "enumerate").answer
            assert decide_subfunction(f, g, c, "csp").answer == e


def test_fast_paths_agree_with_csp_k3():
    rng = random.Random(7)
    ops = all_operations(3, 1) + [Operation(3, 2, [rng.randrange(3) for _ in range(9)]) for _ in range(30)]
    ops += [Operation(3, 2, [rng.choice((0, 2)) for _ in range(9)]) for _ in range(5)]
    for f, g in itertools.product(ops, repeat=2):
        for c in (B(2), B(3)):
            fast = decide_subfunction(f, g, c)
            assert fast.strategy.startswith("fast")
            assert decide_subfunction(f, g, c, "csp").answer == fast.answer


@settings(max_examples=40)
@given(st.data())
def test_csp_agrees_with_enumerate_k3(data):
    f = data.draw(operations(k=3, arity=1))
    g = data.draw(operations(k=3, arity=2))
    for c in (J, B(0), B(1)):
        assert (decide_subfunction(f, g, c, "csp").answer
                == decide_subfunction(f, g, c, "enumerate").answer)


@settings(max_examples=30)
@given(operations(max_k=3, max_arity=2), operations(max_k=3, max_arity=2))
def test_yes_implies_range_inclusion(f, g):
    if f.k != g.k:
        return
    for i in range(f.k + 1):
        if decide_subfunction(f, g, B(i)).answer:
            assert range_of(f) <= range_of(g)


def test_comparisons(XOR):
    c0, c1 = Operation.constant(2, 1, 0), Operation.constant(2, 1, 1)
    for c in (J, B(0), B(1), B(2)):
        assert compare(c0, c1, c) == Comparison.INCOMPARABLE
    ternary = Operation.from_function(3, 3, lambda a, b, c: (a + b) % 3)
    assert compare(ternary, collapse_inessential(ternary), J) == Comparison.EQUIVALENT
    assert are_equivalent(XOR, collapse_inessential(XOR), J)
    assert compare(Operation.projection(2, 1, 1), XOR, B(0)) == Comparison.STRICTLY_BELOW


def test_g2_below_g3_under_b1():
    # the k=3 family is a chain, not an antichain: g_2 = g_3(x1, x2, xi(x2))
    g2, g3 = antichain_function_k3(2), antichain_function_k3(3)
    w = g_chain_witness(2)
    assert compose(g3, list(w)) == g2
    assert all(clone_membership(h, B(0)) for h in w)
    d = decide_subfunction(g2, g3, B(1), "enumerate")
    assert d.answer
    assert compare(g2, g3, B(1)) == Comparison.STRICTLY_BELOW


def test_same_range_witness_examples(AND):
    ident = Operation.unary(3, [0, 1, 2])
    xi, inner = equivalence_witness_same_range(ident, B(0))
    assert xi == ident and inner == (ident,)
    xi, inner = equivalence_witness_same_range(AND, B(2))
    assert xi == Operation.unary(2, [0, 1])
    assert [list(h.table) for h in inner] == [[0, 1], [0, 1]]
    f = Operation(3, 2, [0, 2, 0, 2, 2, 0, 0, 0, 2])
    xi, inner = equivalence_witness_same_range(f, B(2))
    assert range_of(xi) == {0, 2} and xi(0) == 0 and xi(2) == 2
    assert compose(f, list(inner)) == xi
    with pytest.raises(InputError):
        equivalence_witness_same_range(Operation.from_function(3, 2, lambda x, y: (x + y) % 3), B(2))


@pytest.mark.parametrize("f", [
    Operation.from_function(3, 2, lambda x, y: (x + y) % 3),
    antichain_function(4, 2),
])
def test_top_class_witness(f):
    h = top_class_witness(f, f)
    top = B(f.k - 1)
    assert all(clone_membership(hj, top) for hj in h)
    assert all(len(set(hj.table)) <= f.k - 1 for hj in h)
    assert brute_compose(f, list(h)) == f


def test_top_class_witness_rejects_unary():
    with pytest.raises(InputError):
        top_class_witness(Operation.unary(3, [2, 1, 0]), Operation.unary(3, [2, 1, 0]))


def test_deterministic_witnesses():
    f, g = antichain_function_k3(2), antichain_function_k3(3)
    a = decide_subfunction(f, g, B(1), "csp")
    b = decide_subfunction(f, g, B(1), "csp")
    assert a.witness == b.witness and a.nodes_explored == b.nodes_explored


def test_capacity_is_not_no():
    f, g = antichain_function(4, 2), antichain_function(4, 3)
    with pytest.raises(CapacityError):
        decide_subfunction(f, g, B(2), "enumerate", ceiling=1000)


def test_input_errors(XOR):
    with pytest.raises(InputError):
        decide_subfunction(XOR, Operation.unary(3, [0, 1, 2]), B(1))
    with pytest.raises(InputError):
        decide_subfunction(XOR, XOR, B(3))
    with pytest.raises(InputError):
        decide_subfunction(XOR, XOR, B(1), "magic")
