"""The acceptance suite: one check per headline property, each with a time budget.

Every check returns a CheckResult; ``status`` is ``pass`` only when the
property holds exactly and the check finished inside its budget.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from math import comb, prod
from typing import Callable

import numpy as np

from .clones import B, clone_membership, least_burle_clone
from .config import CapacityError, InternalError
from .decomp import build_retraction, degree, optimal_decompositions
from .families import (
    antichain_function,
    antichain_function_k3,
    chain_function,
    chain_step_composite,
    chain_step_witness,
    chain_step_witness_unrestricted,
)
from .finops import (
    Operation,
    essential_arity,
    find_essential_triple,
    kernel_transversal_small_projections,
    range_of,
    to_text,
)
from .posets import PosetShape, check_shape, max_antichain, max_chain, quotient_poset
from .quasilinear import (
    Gf2BlockMatrix,
    QuasilinearForm,
    from_standard_form,
    negate,
    inner_negate,
    normalize,
    rado_condition_row_reduction,
    rado_condition_singular_transversals,
    standard_form,
)
from .subfunc import (
    are_equivalent,
    decide_subfunction,
    equivalence_witness_same_range,
    top_class_witness,
)

SEED = 20240611


@dataclass
class CheckResult:
    number: int
    name: str
    status: str
    elapsed: float
    budget: float
    detail: str = ""
    counters: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def line(self) -> str:
        return (f"[{self.status.upper():8}] {self.number:2d}. {self.name} "
                f"({self.elapsed:.2f}s / budget {self.budget:.0f}s){': ' + self.detail if self.detail else ''}")

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "status": self.status,
                "elapsed": round(self.elapsed, 3), "budget": self.budget,
                "detail": self.detail, "counters": self.counters}


class _Failed(Exception):
    pass


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise _Failed(message)


def _run(number: int, name: str, budget: float, body: Callable[[dict], str]) -> CheckResult:
    counters: dict = {}
    start = time.perf_counter()
    try:
        detail = body(counters) or ""
        status = "pass"
    except _Failed as exc:
        detail, status = str(exc), "fail"
    except CapacityError as exc:
        detail, status = str(exc), "capacity"
    except InternalError as exc:
        detail, status = f"internal error: {exc}", "fail"
    elapsed = time.perf_counter() - start
    if status == "pass" and elapsed > budget:
        status, detail = "fail", f"exceeded time budget ({detail})" if detail else "exceeded time budget"
    return CheckResult(number, name, status, elapsed, budget, detail, counters)


def _binary_ops(k: int) -> list[Operation]:
    return [Operation(k, 2, t) for t in itertools.product(range(k), repeat=k * k)]


def _sample_op(rng: random.Random, k: int, n: int) -> Operation:
    """Random table over a random nonempty value set, so small ranges are well represented."""
    size = rng.randint(1, k)
    values = rng.sample(range(k), size)
    return Operation(k, n, [rng.choice(values) for _ in range(k**n)])


# -- 1, 2: poset structure ------------------------------------------------------------------


def check_top_clone_structure() -> CheckResult:
    def body(ctr):
        p = quotient_poset(2, B(2), 2, symbolic=False)
        _expect(len(p) == 3, f"k=2 enumerated B2 poset has {len(p)} classes, expected 3")
        _expect(check_shape(p, PosetShape.powerset_minus_bottom(2)).matches, "k=2 shape mismatch")
        for k in (3, 4):
            q = quotient_poset(k, B(k), 2, symbolic=True)
            got = (len(q), max_chain(q), max_antichain(q))
            want = (2**k - 1, k, comb(k, k // 2))
            ctr[f"k{k}"] = got
            _expect(got == want, f"k={k}: (classes, chain, antichain) = {got}, expected {want}")
            _expect(check_shape(q, PosetShape.powerset_minus_bottom(k)).matches, f"k={k} shape mismatch")
        return "3 / 7 / 15 classes; chains 3, 4; antichains 3, 6"
    return _run(1, "B_k quotient is the nonempty-subset lattice", 5, body)


def check_maximal_clone_structure() -> CheckResult:
    def body(ctr):
        p = quotient_poset(3, B(2), 2, symbolic=False)
        got = (len(p), max_chain(p), max_antichain(p))
        ctr["classes"], ctr["chain"], ctr["antichain"] = got
        _expect(got == (8, 4, 3), f"(classes, chain, antichain) = {got}, expected (8, 4, 3)")
        _expect(check_shape(p, PosetShape.powerset_minus_bottom_plus_top(3)).matches, "shape mismatch")
        return "8 classes, chain 4, antichain 3"
    return _run(2, "B_{k-1} quotient is the subset lattice plus a top", 60, body)


# -- 3: chain step identity -------------------------------------------------------------------


def check_chain_identity() -> CheckResult:
    def body(ctr):
        notes = []
        for n in (3, 4, 5):
            g = chain_step_witness(4, n)
            _expect(range_of(g) <= {0, 1}, f"n={n}: step witness range {sorted(range_of(g))}")
            _expect(chain_step_composite(4, n, g) == chain_function(4, n + 1), f"n={n}: identity fails")
            loose = chain_step_witness_unrestricted(4, n)
            if chain_step_composite(4, n, loose) != chain_function(4, n + 1):
                notes.append(str(n))
        ctr["unrestricted_variant_fails_at"] = notes
        return "identity holds for n = 3, 4, 5 (unrestricted diagonal clause fails at n = " + ", ".join(notes) + ")"
    return _run(3, "f_{n+1} = f_n(x_2, ..., x_{n+1}, g) at k=4", 10, body)


# -- 4, 5: antichains -------------------------------------------------------------------------


def _incomparable(f: Operation, g: Operation, c, strategy: str, label: str, ctr: dict) -> None:
    below = decide_subfunction(f, g, c, strategy)
    above = decide_subfunction(g, f, c, strategy)
    ctr[label] = {"below": below.answer, "above": above.answer,
                  "nodes": below.nodes_explored + above.nodes_explored}
    for d, direction in ((below, "first below second"), (above, "second below first")):
        if d.answer:
            inner = "; ".join(to_text(h) for h in d.witness)
            raise _Failed(f"{label}: {direction} with inner functions [{inner}]")


def check_k3_antichain() -> CheckResult:
    def body(ctr):
        _incomparable(antichain_function_k3(2), antichain_function_k3(3), B(1), "enumerate", "g2 vs g3", ctr)
        return "g2 and g3 incomparable under B1 (both directions exhausted)"
    return _run(4, "g_2 and g_3 incomparable under B_1 at k=3", 60, body)


def check_k3_antichain_extended() -> list[CheckResult]:
    out = []
    for n, m in ((2, 4), (3, 4)):
        def body(ctr, n=n, m=m):
            _incomparable(antichain_function_k3(n), antichain_function_k3(m), B(1), "csp", f"g{n} vs g{m}", ctr)
            return f"g{n} and g{m} incomparable under B1"
        out.append(_run(4, f"(extended) g_{n} and g_{m} incomparable under B_1 at k=3", 600, body))
    return out


def check_k4_antichain() -> CheckResult:
    def body(ctr):
        f2, f3 = antichain_function(4, 2), antichain_function(4, 3)
        _incomparable(f2, f3, B(2), "csp", "f2 vs f3", ctr)
        return "f2 and f3 incomparable under B2 (type case-split search)"
    return _run(5, "f_2 and f_3 incomparable under B_2 at k=4", 300, body)


def check_chain_properness_extended() -> CheckResult:
    def body(ctr):
        d = decide_subfunction(chain_function(4, 3), chain_function(4, 4), B(2), "csp", ceiling=2_000_000)
        ctr["nodes"] = d.nodes_explored
        _expect(not d.answer, "f_3 lies below f_4 under B2")
        return "f_3 not below f_4 under B2"
    return _run(3, "(extended) f_3 not below f_4 under B_2 at k=4", 600, body)


# -- 6: essential triples ---------------------------------------------------------------------


def check_essential_triples() -> CheckResult:
    def body(ctr):
        eligible = 0
        for f in _binary_ops(3):
            t = find_essential_triple(f)
            wanted = essential_arity(f) >= 2 and len(range_of(f)) >= 3
            _expect((t is not None) == wanted, f"triple presence wrong for {to_text(f)}")
            if t is not None:
                _expect(t.is_valid_for(f), f"invalid triple for {to_text(f)}")
            if wanted:
                eligible += 1
                d = kernel_transversal_small_projections(f)
                r = len(range_of(f))
                _expect(sorted(d) == sorted(range_of(f)), f"not a transversal for {to_text(f)}")
                _expect(all(f(*d[v]) == v for v in d), f"transversal point misplaced for {to_text(f)}")
                for i in range(2):
                    _expect(len({p[i] for p in d.values()}) < r, f"projection too large for {to_text(f)}")
        ctr["eligible"] = eligible
        return f"19683 functions, {eligible} eligible"
    return _run(6, "essential triples and small-projection transversals at k=3", 30, body)


# -- 7: singular transversals vs row reduction ----------------------------------------------


def _compositions(q: int):
    for cuts in itertools.product((0, 1), repeat=q - 1):
        sizes, run = [], 1
        for c in cuts:
            if c:
                sizes.append(run)
                run = 1
            else:
                run += 1
        sizes.append(run)
        yield tuple(sizes)


def check_rado() -> CheckResult:
    def body(ctr):
        cases = 0
        for q in range(2, 5):
            for blocks in _compositions(q):
                if len(blocks) < 2:
                    continue
                for bits in itertools.product((0, 1), repeat=2 * q):
                    M = Gf2BlockMatrix(np.array(bits).reshape(2, q), blocks)
                    a = rado_condition_singular_transversals(M)
                    b = rado_condition_row_reduction(M) is not None
                    _expect(a == b, f"conditions disagree on\n{M.to_text()}")
                    cases += 1
        rng = random.Random(SEED)
        for _ in range(500):
            q = rng.randint(3, 6)
            blocks = rng.choice([bl for bl in _compositions(q) if len(bl) >= 3])
            M = Gf2BlockMatrix(np.array([[rng.randint(0, 1) for _ in range(q)] for _ in range(3)]), blocks)
            a = rado_condition_singular_transversals(M)
            b = rado_condition_row_reduction(M) is not None
            _expect(a == b, f"conditions disagree on\n{M.to_text()}")
            cases += 1
        ctr["cases"] = cases
        return f"{cases} matrices"
    return _run(7, "singular transversals iff row-reducible (GF(2))", 60, body)


# -- 8: standard forms ------------------------------------------------------------------------


def check_standard_forms() -> CheckResult:
    def body(ctr):
        rng = random.Random(SEED)
        done = 0
        while done < 1000:
            k, n = rng.randint(2, 4), rng.randint(1, 4)
            h = [tuple(rng.randint(0, 1) for _ in range(k)) for _ in range(n)]
            if not any(len(set(hi)) > 1 for hi in h):
                continue
            a, b = rng.sample(range(k), 2)
            form = QuasilinearForm(k, (a, b), tuple(h))
            f = from_standard_form(form)
            flips = [rng.random() < 0.5 for _ in range(n)]
            g = inner_negate(form.g) if sum(flips) % 2 else form.g
            twisted = QuasilinearForm(k, g, tuple(negate(hi) if fl else hi for hi, fl in zip(h, flips)))
            _expect(from_standard_form(twisted) == f, "negation changed the function")
            sf = standard_form(f)
            _expect(sf is not None, f"no standard form for {to_text(f)}")
            _expect(normalize(twisted) == sf == normalize(form), f"standard forms differ for {to_text(f)}")
            _expect(from_standard_form(sf) == f, f"round trip fails for {to_text(f)}")
            done += 1
        return "1000 constructions"
    return _run(8, "quasilinear standard forms are unique", 10, body)


# -- 9: B_1 descent ---------------------------------------------------------------------------


def check_b1_descent() -> CheckResult:
    def body(ctr):
        c = B(1)
        ops = _binary_ops(2)
        deg = {}
        for f in ops:
            decs = list(optimal_decompositions(f, c))
            d = degree(f, c)[0]
            deg[f] = (d, decs[0].range_size)
            for dec in decs:
                if dec.outer is None:
                    continue
                full = prod(len(range_of(h)) for h in dec.inners)
                _expect(dec.range_size == full, f"optimal witness of {to_text(f)} misses the product range")
                s2, _ = build_retraction(dec.outer, dec.inners)
                _expect(are_equivalent(f, s2, c), f"retracted outer not B1-equivalent to {to_text(f)}")
        below = {(f, g): decide_subfunction(f, g, c).answer for f in ops for g in ops}
        strict = 0
        for (f, g), yes in below.items():
            if not yes:
                continue
            _expect(deg[f][0] <= deg[g][0], f"degree grew: {to_text(f)} below {to_text(g)}")
            if deg[f][0] == deg[g][0]:
                _expect(deg[f][1] <= deg[g][1], f"range degree grew: {to_text(f)} below {to_text(g)}")
            if not below[g, f]:
                strict += 1
                _expect(deg[f] < deg[g], f"no descent: {to_text(f)} strictly below {to_text(g)}")
        ctr["strict_pairs"] = strict
        return f"{strict} strictly comparable pairs"
    return _run(9, "B_1 degree / range-degree descent at k=2", 300, body)


# -- 10: equivalence witnesses ------------------------------------------------------------------


def check_equivalence_witnesses() -> CheckResult:
    def body(ctr):
        rng = random.Random(SEED)
        sample3 = [_sample_op(rng, 3, 2) for _ in range(200)]
        count = 0
        for f in _binary_ops(2) + sample3:
            lo = least_burle_clone(f).index
            for i in range(lo, f.k + 1):
                xi, inner = equivalence_witness_same_range(f, B(i))
                _expect(range_of(xi) == range_of(f), "xi has the wrong range")
                count += 1
        surj = []
        while len(surj) < 100:
            f = Operation(3, 2, [rng.randrange(3) for _ in range(9)])
            if len(range_of(f)) == 3 and essential_arity(f) == 2:
                surj.append(f)
        for f, g in zip(surj[::2], surj[1::2]):
            h = top_class_witness(f, g)
            _expect(all(clone_membership(x, B(2)) for x in h), "top-class inner function outside B2")
        ctr["same_range"] = count
        ctr["top_pairs"] = 50
        return f"{count} same-range witnesses, 50 top-class pairs"
    return _run(10, "equivalence witness constructions recompose", 60, body)


# -- 11: engine cross-validation ----------------------------------------------------------------


def check_engine_agreement() -> CheckResult:
    def body(ctr):
        agree = 0
        ops2 = _binary_ops(2)
        for f in ops2:
            for g in ops2:
                fast = decide_subfunction(f, g, B(2), "auto")
                _expect(fast.strategy == "fast:Bk", "k=2 B2 decision skipped the fast path")
                _expect(fast.answer == decide_subfunction(f, g, B(2), "csp").answer,
                        f"B2 disagreement at {to_text(f)}, {to_text(g)}")
                # no structural shortcut for B_1 = B_{k-1} at k=2: compare both search engines
                _expect(decide_subfunction(f, g, B(1), "csp").answer
                        == decide_subfunction(f, g, B(1), "enumerate").answer,
                        f"B1 disagreement at {to_text(f)}, {to_text(g)}")
                agree += 1
        rng = random.Random(SEED)
        for _ in range(500):
            f, g = _sample_op(rng, 3, 2), _sample_op(rng, 3, 2)
            for c, tag in ((B(3), "fast:Bk"), (B(2), "fast:Bk-1")):
                fast = decide_subfunction(f, g, c, "auto")
                _expect(fast.strategy == tag, f"{c} decision skipped the fast path")
                _expect(fast.answer == decide_subfunction(f, g, c, "csp").answer,
                        f"{c} disagreement at {to_text(f)}, {to_text(g)}")
            agree += 1
        ctr["pairs"] = agree
        return f"{agree} pairs agree"
    return _run(11, "fast paths agree with the search engine", 300, body)


CORE = (
    check_top_clone_structure,
    check_maximal_clone_structure,
    check_chain_identity,
    check_k3_antichain,
    check_k4_antichain,
    check_essential_triples,
    check_rado,
    check_standard_forms,
    check_b1_descent,
    check_equivalence_witnesses,
    check_engine_agreement,
)


def run_core() -> list[CheckResult]:
    return [check() for check in CORE]


def run_extended() -> list[CheckResult]:
    return check_k3_antichain_extended() + [check_chain_properness_extended()]
