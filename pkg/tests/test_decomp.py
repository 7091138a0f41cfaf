import itertools
import random

import pytest

from clonelab.clones import B, clone_membership, enumerate_clone
from clonelab.config import CapacityError, InputError
from clonelab.decomp import (
    build_retraction,
    degree,
    is_functionally_independent,
    joint_range,
    optimal_decompositions,
    outer_exists,
    range_degree,
)
from clonelab.finops import Operation, compose, essential_variables, range_of
from clonelab.subfunc import are_equivalent, decide_subfunction

from conftest import all_operations, brute_eval

K2_OPS = all_operations(2, 1) + all_operations(2, 2)


def _x(k, n, i):
    return Operation.projection(k, n, i)


def _brute_degrees(f, c):
    # smallest d over ordered d-tuples, then least joint range among them
    if len(set(f.table)) == 1:
        return 0, 0
    pool = list(enumerate_clone(f.k, f.arity, c))
    pts = list(itertools.product(range(f.k), repeat=f.arity))
    for d in range(1, f.arity + 1):
        best = None
        for hs in itertools.product(pool, repeat=d):
            image = {}
            ok = True
            for p in pts:
                key = tuple(brute_eval(h, p) for h in hs)
                if image.setdefault(key, brute_eval(f, p)) != brute_eval(f, p):
                    ok = False
                    break
            if ok:
                best = len(image) if best is None else min(best, len(image))
        if best is not None:
            return d, best
    raise AssertionError("no decomposition")


def test_outer_exists_examples(AND, XOR):
    x1, x2 = _x(2, 2, 1), _x(2, 2, 2)
    assert outer_exists(AND, [x1, x2]) == AND
    assert outer_exists(AND, [XOR]) is None
    f = Operation.from_function(3, 2, lambda a, b: (a * b + 1) % 3)
    assert outer_exists(f, [_x(3, 2, 1), _x(3, 2, 2)]) == f


def test_outer_is_zero_off_joint_range(XOR):
    x1 = _x(2, 2, 1)
    s = outer_exists(XOR, [x1, x1, XOR])
    reached = joint_range([x1, x1, XOR])
    for p in itertools.product((0, 1), repeat=3):
        if p not in reached:
            assert s(*p) == 0


def test_degree_examples(AND, XOR):
    for c in (B(0), B(1), B(2)):
        d, dec = degree(Operation.constant(2, 2, 1), c)
        assert d == 0 and dec.outer is None and dec.recompose() == Operation.constant(2, 2, 1)
    assert degree(XOR, B(1))[0] == 1
    assert degree(AND, B(1))[0] == 2
    assert range_degree(AND, B(1))[0] == 4
    assert range_degree(XOR, B(1))[0] == 2
    r, dec = range_degree(Operation.constant(3, 2, 2), B(1))
    assert r == 0 and dec.d == 0


@pytest.mark.parametrize("i", [0, 1, 2])
def test_degrees_match_brute_force_k2(i):
    for f in K2_OPS:
        d, dec = degree(f, B(i))
        r, opt = range_degree(f, B(i))
        assert (d, r) == _brute_degrees(f, B(i))
        assert dec.recompose() == f and opt.recompose() == f
        assert d <= len(essential_variables(f))


def test_degrees_match_brute_force_k3_sample():
    rng = random.Random(2)
    for _ in range(15):
        f = Operation(3, 2, [rng.randrange(3) for _ in range(9)])
        assert (degree(f, B(1))[0], range_degree(f, B(1))[0]) == _brute_degrees(f, B(1))


def test_independence_examples():
    x1, x2 = _x(2, 2, 1), _x(2, 2, 2)
    assert not is_functionally_independent([x1, x1])
    assert not is_functionally_independent([x1, Operation.constant(2, 2, 0)])
    assert is_functionally_independent([x1, x2])
    with pytest.raises(InputError):
        is_functionally_independent([x1])


def _ess_hall(inners):
    for size in range(1, len(inners) + 1):
        for sub in itertools.combinations(inners, size):
            if len(set().union(*(essential_variables(h) for h in sub))) < size:
                return False
    return True


@pytest.mark.parametrize("k,ops", [
    (2, K2_OPS),
    (3, [Operation(3, 2, [random.Random(s).randrange(3) for _ in range(9)]) for s in range(12)]),
])
def test_minimal_and_optimal_witness_structure(k, ops):
    for f in ops:
        for dec in optimal_decompositions(f, B(1)):
            if dec.d >= 2:
                assert is_functionally_independent(dec.inners)
            assert _ess_hall(dec.inners)
            product = set(itertools.product(*(sorted(range_of(h)) for h in dec.inners)))
            assert set(dec.joint_range()) == product


def test_retraction_examples(AND, XOR):
    x1, x2 = _x(2, 2, 1), _x(2, 2, 2)
    s2, psi = build_retraction(AND, [x1, x2])
    assert s2 == AND and psi.psi == (x1, x2)

    inners = [XOR, x1]
    s2, psi = build_retraction(AND, inners)
    assert compose(s2, inners) == compose(AND, inners)

    rng = random.Random(4)
    s = Operation(3, 3, [rng.randrange(3) for _ in range(27)])
    phi1 = Operation(3, 3, [rng.randrange(2) for _ in range(27)])
    phi1 = Operation(3, 3, [0] + list(phi1.table[1:]))
    phi1 = Operation(3, 3, list(phi1.table[:-1]) + [1])
    inners = [phi1, _x(3, 3, 2), _x(3, 3, 3)]
    s2, psi = build_retraction(s, inners)
    assert psi.psi[0](2, 0, 0) == phi1(0, 0, 0)
    assert psi.psi[0](1, 2, 2) == 1
    assert compose(s2, inners) == compose(s, inners)
    assert compose(s2, list(psi.psi)) == s2


def test_optimal_retraction_is_equivalent_k2():
    for f in K2_OPS:
        for dec in optimal_decompositions(f, B(1)):
            if dec.outer is None:
                continue
            s2, _ = build_retraction(dec.outer, dec.inners)
            assert are_equivalent(f, s2, B(1))


def test_monotonicity_and_descent_k2():
    c = B(1)
    deg = {f: (degree(f, c)[0], range_degree(f, c)[0]) for f in K2_OPS}
    for f, g in itertools.product(K2_OPS, repeat=2):
        if not decide_subfunction(f, g, c).answer:
            continue
        assert deg[f][0] <= deg[g][0]
        if deg[f][0] == deg[g][0]:
            assert deg[f][1] <= deg[g][1]
        if not decide_subfunction(g, f, c).answer:
            assert deg[f] < deg[g]


def test_capacity_refusal():
    f = Operation.from_function(4, 2, lambda a, b: (a + b) % 4)
    with pytest.raises(CapacityError):
        degree(f, B(2), ceiling=1000)


def test_membership_of_inners():
    f = Operation.from_function(3, 2, lambda a, b: max(a, b))
    for c in (B(0), B(1), B(2)):
        d, dec = degree(f, c)
        assert all(clone_membership(h, c) for h in dec.inners)
