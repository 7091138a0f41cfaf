"""Command-line interface: ``clonelab <command> ...``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input,
3 a search or enumeration ceiling was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import verify
from .clones import CloneId
from .config import CapacityError, InputError
from .decomp import range_degree
from .families import antichain_function, antichain_function_k3, chain_function, chain_step_witness
from .finops import Operation, parse_operation, to_text
from .posets import max_antichain, max_chain, quotient_poset, to_dot
from .quasilinear import standard_form
from .subfunc import STRATEGIES, compare, decide_subfunction


def read_operation(value: str) -> Operation:
    """Inline ``FN ...`` / JSON text, or a path to a file holding either."""
    s = value.strip()
    if s.startswith("FN") or s.startswith("{"):
        return parse_operation(s)
    path = Path(value)
    if not path.is_file():
        raise InputError(f"{value!r} is neither an inline operation nor a readable file")
    return parse_operation(path.read_text())


def _emit(args, payload: dict, text: str) -> None:
    if args.text:
        print(text)
    else:
        print(json.dumps(payload, sort_keys=True))


def _clone(args) -> CloneId:
    return CloneId.parse(args.clone)


def cmd_decide(args) -> int:
    f, g = read_operation(args.f), read_operation(args.g)
    d = decide_subfunction(f, g, _clone(args), args.strategy, args.ceiling)
    witness = [to_text(h) for h in d.witness] if d.witness else None
    payload = {"answer": d.answer, "strategy": d.strategy, "nodes_explored": d.nodes_explored,
               "witness": witness, "details": d.details}
    lines = [f"{'yes' if d.answer else 'no'} ({d.strategy}, {d.nodes_explored} nodes)"]
    lines += [f"  h{i + 1} = {t}" for i, t in enumerate(witness or [])]
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_compare(args) -> int:
    f, g = read_operation(args.f), read_operation(args.g)
    rel = compare(f, g, _clone(args), args.strategy, args.ceiling)
    _emit(args, {"relation": rel.value}, rel.value)
    return 0


def cmd_degree(args) -> int:
    f = read_operation(args.f)
    c = _clone(args)
    r, dec = range_degree(f, c, args.ceiling)
    payload = {
        "d": dec.d,
        "r": r,
        "outer": to_text(dec.outer) if dec.outer is not None else None,
        "inners": [to_text(h) for h in dec.inners],
    }
    text = f"deg = {dec.d}, range degree = {r}"
    if dec.outer is not None:
        text += f"\n  outer = {payload['outer']}" + "".join(f"\n  phi = {t}" for t in payload["inners"])
    _emit(args, payload, text)
    return 0


def cmd_standard_form(args) -> int:
    f = read_operation(args.f)
    form = standard_form(f)
    if form is None:
        _emit(args, {"quasilinear": False}, "not a nonconstant quasilinear operation")
        return 0
    payload = {"quasilinear": True, "g": list(form.g), "h": [list(h) for h in form.h]}
    text = f"g = {form.g}\n" + "\n".join(f"h{i + 1} = {h}" for i, h in enumerate(form.h))
    _emit(args, payload, text)
    return 0


def cmd_family(args) -> int:
    if args.kind == "chain":
        f = chain_function(args.k, args.n)
        payload = {"operation": to_text(f)}
        if args.step_witness:
            payload["step_witness"] = to_text(chain_step_witness(args.k, args.n))
    else:
        f = antichain_function_k3(args.n) if args.k == 3 else antichain_function(args.k, args.n)
        payload = {"operation": to_text(f)}
    _emit(args, payload, "\n".join(payload.values()))
    return 0


def _poset(args):
    symbolic = True if args.symbolic else None
    return quotient_poset(args.k, _clone(args), args.max_arity, symbolic=symbolic, workers=args.threads)


def cmd_classes(args) -> int:
    p = _poset(args)
    classes = [{"name": c.name(), "representative": to_text(c.representative), "size": c.size}
               for c in p.classes]
    payload = {"classes": classes, "order": p.order.astype(int).tolist(), "symbolic": p.symbolic,
               "max_chain": max_chain(p), "max_antichain": max_antichain(p)}
    text = "\n".join(f"{i}: {c['name']}  {c['representative']}" for i, c in enumerate(classes))
    text += f"\n{len(classes)} classes, longest chain {payload['max_chain']}, widest antichain {payload['max_antichain']}"
    _emit(args, payload, text)
    return 0


def cmd_hasse(args) -> int:
    dot = to_dot(_poset(args))
    if args.dot:
        Path(args.dot).write_text(dot)
    else:
        sys.stdout.write(dot)
    return 0


def cmd_verify(args) -> int:
    results = []
    if not args.extended_only:
        results += [(r, True) for r in verify.run_core()]
    if args.extended or args.extended_only:
        results += [(r, False) for r in verify.run_extended()]
    failed = any(core and r.status != "pass" for r, core in results)
    failed |= any(not core and r.status == "fail" for r, core in results)
    payload = {"ok": not failed, "checks": [dict(r.to_json(), core=core) for r, core in results]}
    _emit(args, payload, "\n".join(r.line() for r, _ in results))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", dest="text", action="store_false", default=False,
                        help="JSON output (default)")
    common.add_argument("--text", dest="text", action="store_true", help="human-readable output")
    common.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")
    common.add_argument("--ceiling", type=int, default=None,
                        help="search/enumeration ceiling (default: CLONELAB_CEILING or built-in)")

    parser = argparse.ArgumentParser(prog="clonelab", description="C-subfunction toolkit for finite operations")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_pair(p):
        p.add_argument("--clone", required=True, help="J or B0..Bk")
        p.add_argument("--f", required=True, help="operation: inline 'FN k=.. n=.. t=..', JSON, or file")
        p.add_argument("--g", required=True, help="operation: inline, JSON, or file")
        p.add_argument("--strategy", choices=STRATEGIES, default="auto")

    p = sub.add_parser("decide", parents=[common], help="is f a C-subfunction of g?")
    with_pair(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("compare", parents=[common], help="order relation between f and g")
    with_pair(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("degree", parents=[common], help="C-degree and range degree of f")
    p.add_argument("--clone", required=True)
    p.add_argument("--f", required=True)
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("standard-form", parents=[common], help="quasilinear standard form of f")
    p.add_argument("--f", required=True)
    p.set_defaults(func=cmd_standard_form)

    p = sub.add_parser("family", parents=[common], help="generate chain / antichain family members")
    p.add_argument("kind", choices=("chain", "antichain"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--step-witness", action="store_true", help="chain only: also emit the step witness")
    p.set_defaults(func=cmd_family)

    for name, func, helptext in (("classes", cmd_classes, "quotient poset classes"),
                                 ("hasse", cmd_hasse, "Hasse diagram in DOT")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--clone", required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--max-arity", type=int, default=2)
        p.add_argument("--symbolic", action="store_true", help="build B_k / B_{k-1} classes from ranges")
        if name == "hasse":
            p.add_argument("--dot", help="write DOT to this file instead of stdout")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", aliases=["verify-paper"], parents=[common], help="run the acceptance suite")
    p.add_argument("--core", action="store_true", help="core checks only (default)")
    p.add_argument("--extended", action="store_true", help="core plus extended checks")
    p.add_argument("--extended-only", action="store_true", help="extended checks only")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity: {exc} (ceiling {exc.bound})", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
