"""Command-line interface.

Exit codes: 0 success, 1 a check failed (or an internal invariant broke),
2 a capability or parameter error (including malformed graph6 input).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import is_dataclass
from fractions import Fraction

from . import __version__
from .detectors import Arbitrary, find_induced
from .errors import (
    CapabilityError,
    Graph6Error,
    HypothesisUnmetError,
    InternalInvariantError,
    ParameterError,
    RamseyChiError,
)
from .extraction import broom_extract, gyarfas_extract, revalidate, stablechi_extract
from .graph import Graph, generate, parse_family
from .graph6 import parse_any, write_graph6
from .harness import CHECK_IDS, check_spec, extremal_search, parse_source, report_emit, scan
from .invariants import exact_invariants, set_chi_budget, set_ramsey_table
from .skeletons import (
    DEFAULT_SEARCH_BUDGET,
    build_skeleton_step,
    find_skeleton,
    grow_skeleton,
    sparse_tree,
)


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Graph):
        return write_graph6(value)
    if is_dataclass(value):
        return {k: _jsonable(getattr(value, k)) for k in value.__dataclass_fields__}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _cert_dict(cert) -> dict:
    out = {"kind": cert.kind}
    for name in cert.__dataclass_fields__:
        if name == "kind":
            continue
        out[name] = _jsonable(getattr(cert, name))
    return out


def _emit(doc) -> None:
    print(json.dumps(_jsonable(doc), indent=1))


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _graph(text: str) -> Graph:
    return parse_any(text)


def _param(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, int(value)
    except ValueError:
        pass
    try:
        return key, Fraction(value)
    except (ValueError, ZeroDivisionError):
        return key, value


def _skeleton_doc(sk) -> dict:
    return {"parent": list(sk.tree.parent), "map": list(sk.map), "root": sk.map[0], "depth": sk.tree.depth}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    G = generate(parse_family(args.spec))
    text = write_graph6(G)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_inv(args) -> int:
    G = _graph(args.graph6)
    inv = exact_invariants(G)
    _emit({"n": G.n, "m": G.num_edges(), "chi": inv.chi, "omega": inv.omega, "alpha": inv.alpha,
           "degeneracy": inv.degeneracy})
    return 0


def cmd_free(args) -> int:
    G = _graph(args.graph6)
    try:
        pattern = generate(parse_family(args.pattern))
    except ParameterError:
        pattern = Arbitrary(parse_any(args.pattern))
    emb = find_induced(G, pattern)
    _emit({"free": emb is None, "embedding": emb})
    return 0


def cmd_extract(args) -> int:
    G = _graph(args.graph6)
    if args.method == "gyarfas":
        res = gyarfas_extract(G, args.s, args.q, args.k, force=args.force)
    elif args.method == "broom":
        res = broom_extract(G, args.k, args.l, args.s, args.q, force=args.force)
    else:
        res = stablechi_extract(G, args.s, args.q, a_opt=args.a)
    ok = revalidate(G, res.certificate, s=res.s)
    _emit({"certificate": _cert_dict(res.certificate), "revalidated": ok,
           "hypothesis_met": res.hypothesis_met, "degraded": res.degraded})
    return 0 if ok else 1


def cmd_skeleton(args) -> int:
    G = _graph(args.graph6)
    budget = args.budget or DEFAULT_SEARCH_BUDGET
    if args.action == "find":
        sk = find_skeleton(G, args.d, args.h, args.root, budget=budget)
        _emit({"found": sk is not None, "skeleton": _skeleton_doc(sk) if sk else None})
        return 0
    if args.c is None:
        raise ParameterError("c", "required for grow and step")
    if args.action == "grow":
        res = grow_skeleton(G, args.c, args.t, args.d, args.h, force=args.force, budget=budget)
        _emit({"skeleton": _skeleton_doc(res.skeleton), "degraded": res.degraded})
        return 0
    res = build_skeleton_step(G, args.c, args.t, args.d, args.h, force=args.force, budget=budget)
    _emit({"branch": res.branch, "X": list(res.X), "J": list(res.J) if res.J is not None else None,
           "skeleton": _skeleton_doc(res.skeleton) if res.skeleton else None, "degraded": res.degraded})
    return 0


def cmd_tree(args) -> int:
    G = _graph(args.graph6)
    try:
        F = generate(parse_family(args.target))
    except ParameterError:
        F = parse_any(args.target)
    res = sparse_tree(G, F, args.c, args.t, force=args.force, width=args.width,
                      budget=args.budget or DEFAULT_SEARCH_BUDGET)
    _emit({"embedding": res.embedding, "root": res.root, "h": res.h, "d": res.d,
           "stalled": res.stalled, "degraded": res.degraded})
    return 0 if res.embedding is not None else 1


def _checks(args) -> list:
    params = dict(args.param or [])
    return [check_spec(cid, **{k: v for k, v in params.items()}) for cid in args.check]


def cmd_scan(args) -> int:
    report = scan(parse_source(args.source), _checks(args), workers=args.workers)
    text = report_emit(report, args.format, args.out)
    if not args.out:
        sys.stdout.write(text)
    else:
        counts = {v: report.count(v) for v in ("PASS", "FAIL", "NA", "REPORT", "ERROR")}
        print(" ".join(f"{k}={v}" for k, v in counts.items()))
    if report.count("FAIL"):
        return 1
    return 2 if report.count("ERROR") else 0


def cmd_extremal(args) -> int:
    if args.bound == "cocktailks":
        bound = check_spec("cocktailks", **dict(args.param or []))
    else:
        bound = args.bound
    res = extremal_search(parse_source(args.source), bound, args.top, args.limit)
    _emit({"examined": res.examined, "eligible": res.eligible, "partial": res.partial,
           "top": [{"ratio": e.ratio, "graph6": e.graph6, "chi": e.chi, "omega": e.omega, "bound": e.bound}
                   for e in res.top]})
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ramseychi", description="Chi-boundedness toolkit.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--ramsey-table", help="file of exact Ramsey values (s w value source)")
    p.add_argument("--budget", type=int, help="node budget for chromatic and skeleton searches")
    p.add_argument("--seed", type=int, default=0, help="base seed for random:n,p,count sources")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph family member as graph6")
    g.add_argument("spec")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    g = sub.add_parser("inv", help="exact invariants")
    g.add_argument("graph6")
    g.set_defaults(func=cmd_inv)

    g = sub.add_parser("free", help="induced-subgraph test")
    g.add_argument("graph6")
    g.add_argument("--pattern", required=True)
    g.set_defaults(func=cmd_free)

    g = sub.add_parser("extract", help="certificate extraction")
    g.add_argument("method", choices=["gyarfas", "broom", "stablechi"])
    g.add_argument("graph6")
    g.add_argument("--s", type=int, default=2)
    g.add_argument("--q", type=int, default=1)
    g.add_argument("--k", type=int, default=5)
    g.add_argument("--l", type=int, default=2)
    g.add_argument("--a", type=int, help="stablechi: try the size form with this a")
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=cmd_extract)

    g = sub.add_parser("skeleton", help="skeleton search and construction")
    g.add_argument("action", choices=["find", "grow", "step"])
    g.add_argument("graph6")
    g.add_argument("--c", type=_fraction)
    g.add_argument("--t", type=int, default=1)
    g.add_argument("--d", type=_fraction, required=True)
    g.add_argument("--h", type=int, required=True)
    g.add_argument("--root", type=int)
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=cmd_skeleton)

    g = sub.add_parser("tree", help="induced tree in a sparse graph")
    g.add_argument("graph6")
    g.add_argument("--target", required=True, help="family spec or graph6 of a tree")
    g.add_argument("--c", type=_fraction, required=True)
    g.add_argument("--t", type=int, default=1)
    g.add_argument("--width", type=_fraction, help="skeleton width (forced runs only)")
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=cmd_tree)

    g = sub.add_parser("scan", help="run checks over a graph source")
    g.add_argument("--source", required=True,
                   help="enum:N | file:path | random:n,p,seed,count | graph6:<string>")
    g.add_argument("--check", action="append", required=True, choices=CHECK_IDS)
    g.add_argument("--param", action="append", type=_param, help="check parameter key=value")
    g.add_argument("--format", choices=["json", "csv"], default="json")
    g.add_argument("--out")
    g.add_argument("--workers", type=int, default=1)
    g.set_defaults(func=cmd_scan)

    g = sub.add_parser("extremal", help="graphs closest to a bound")
    g.add_argument("--source", required=True)
    g.add_argument("--bound", required=True, help="literature registry key or cocktailks")
    g.add_argument("--param", action="append", type=_param)
    g.add_argument("--top", type=int, default=5)
    g.add_argument("--limit", type=int, help="stop after this many graphs (result flagged partial)")
    g.set_defaults(func=cmd_extremal)
    return p


def _expand_seed(args) -> None:
    src = getattr(args, "source", None)
    if src and src.startswith("random:") and src.count(",") == 2:
        n, p, count = src[len("random:"):].split(",")
        args.source = f"random:{n},{p},{args.seed},{count}"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.ramsey_table:
            set_ramsey_table(args.ramsey_table)
        if args.budget:
            set_chi_budget(args.budget)
        _expand_seed(args)
        return args.func(args)
    except (CapabilityError, ParameterError, Graph6Error, HypothesisUnmetError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (InternalInvariantError, RamseyChiError) as exc:
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
