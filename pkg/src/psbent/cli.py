"""Command line interface.

Exit codes: 0 pass, 1 verified failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .algebra import AlgebraError, LinearFunctional, build_field
from .construct import (
    ConstructionError,
    DSets,
    FunctionTable,
    balanced_function,
    is_balanced,
    ps_bent,
    qf_bent,
    to_vector_function,
)
from .formats import (
    FORMAT_VERSION,
    FormatError,
    dumps,
    function_from_json,
    function_to_json,
    load,
    write_atomic,
)
from .groups import CATALOG, GroupError, as_group, parse_group
from .spreads import (
    INF,
    PREQUASIFIELDS,
    PrequasifieldViolation,
    SpreadError,
    build_spread,
    make_partition,
    prequasifield_by_name,
    prequasifield_from_json,
)
from .verify import (
    VerifyError,
    build_relative_difference_set,
    inequivalence_bounds,
    verify_association_scheme,
    verify_bent_combinatorial,
    verify_bent_fourier,
    verify_counts,
    verify_rds,
)

INPUT_ERRORS = (AlgebraError, GroupError, SpreadError, ConstructionError, VerifyError,
                FormatError, ValueError, KeyError, OSError, json.JSONDecodeError)


class InvalidInput(Exception):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {"error": message}


def _emit(doc: dict, args, summary: str) -> None:
    text = dumps(doc)
    if args.out:
        write_atomic(args.out, text)
    if args.json or not args.out:
        sys.stdout.write(text)
    print(summary, file=sys.stderr)


def _manifest(args, **extra) -> dict:
    keys = [k for k in vars(args) if k not in ("func", "out", "json")]
    return {"command": args.command, "version": __version__,
            "arguments": {k: getattr(args, k) for k in sorted(keys)}, **extra}


def _slope(text: str):
    text = text.strip()
    return INF if text in (INF, "∞") else int(text)


def _prequasifield(spec: str):
    if spec.endswith(".json"):
        result = prequasifield_from_json(load(spec))
        if isinstance(result, PrequasifieldViolation):
            raise InvalidInput(result.message, {"error": "invalid prequasifield", **result.to_json()})
        return result
    return prequasifield_by_name(spec)


# -- commands ---------------------------------------------------------------------------

def cmd_construct_ps(args) -> int:
    if args.prequasifield:
        Q = _prequasifield(args.prequasifield)
    else:
        if args.p is None or args.m is None:
            raise InvalidInput("give --p and --m (or --prequasifield)")
        Q = prequasifield_by_name(f"field({args.p},{args.m})")
    H = parse_group(args.H)
    if args.q is not None and args.q != H.order:
        raise InvalidInput(f"--q {args.q} does not match |H| = {H.order}")
    spread = build_spread(Q)
    slopes = [_slope(s) for s in args.slopes.split(",")] if args.slopes else list(spread.components)
    if args.blocks == "round-robin":
        assignment = "round-robin"
    else:
        position = {s: i for i, s in enumerate(slopes)}
        try:
            assignment = [[position[_slope(s)] for s in block.split(",")]
                          for block in args.blocks.split(";")]
        except KeyError as exc:
            raise InvalidInput(f"block slope {exc} is not among --slopes") from None
    P = make_partition(spread.select(slopes), H, assignment, labels=slopes)
    f = ps_bent(P)
    f.provenance["sigma"] = [str(s) for s in slopes]
    f.provenance["prequasifield"] = Q.name
    doc = function_to_json(f, _manifest(args))
    _emit(doc, args, f"wrote {len(f.values)}-entry function table to {args.out}")
    return 0


def _g_function(args, Q, K) -> FunctionTable:
    spec = args.g
    if spec in ("round-robin", "seeded"):
        method = "round-robin" if spec == "round-robin" else "seeded-shuffle"
        return balanced_function(Q.field, K, method, args.seed)
    doc = load(spec)
    values = doc["values"] if isinstance(doc, dict) else doc
    g = FunctionTable(Q.field, K, values)
    if not is_balanced(g):
        counts = np.bincount(g.values, minlength=K.order).tolist()
        raise InvalidInput("g is not balanced", {"error": "g is not balanced", "fiber_sizes": counts})
    return g


def cmd_construct_qf(args) -> int:
    Q = _prequasifield(args.prequasifield)
    F = Q.field
    if F.m % args.K_degree:
        raise InvalidInput(f"GF({F.p}^{args.K_degree}) is not a subfield of {F}")
    K = build_field(F.p, args.K_degree)
    g = _g_function(args, Q, K)
    f = qf_bent(Q, K, g)
    doc = function_to_json(f, _manifest(args, seed=args.seed))
    _emit(doc, args, f"wrote {len(f.values)}-entry function table to {args.out}")
    return 0


def _load_function(path) -> FunctionTable:
    if not path:
        raise InvalidInput("an input function table is required")
    return function_from_json(load(path))


def _functional(args, K):
    if not args.T:
        return None
    return LinearFunctional(K, tuple(int(w) for w in args.T.split(",")))


def cmd_verify(args) -> int:
    what = args.what
    if what == "counts" and not args.input:
        return cmd_counts(args)
    f = _load_function(args.input)
    if what == "bent-combinatorial":
        report = verify_bent_combinatorial(f)
        ok = report.bent
        summary = f"{what}: {report.verdict}"
        if ok:
            summary += f" (every derivative takes each value {report.details['expected_count']} times)"
    elif what == "bent-fourier":
        fv = to_vector_function(f)
        report = verify_bent_fourier(fv, _functional(args, fv.codomain))
        ok = report.bent
        summary = f"{what}: {report.verdict}"
        if ok:
            summary += f" (all |f^_k(u)|^2 = {report.details['expected_norm_squared']})"
    elif what == "rds":
        g = build_relative_difference_set(f)
        report = verify_rds(g.members, g.ambient, g.forbidden)
        ok = report.ok
        summary = f"rds: {'pass ' + str(report.params.as_tuple()) if ok else 'fail'}"
    elif what == "scheme":
        D = DSets(as_group(f.domain), as_group(f.codomain), f.values)
        report = verify_association_scheme(D)
        ok = report.ok
        summary = f"scheme: {'pass' if ok else 'fail'} ({len(report.classes)} classes)"
    elif what == "counts":
        D = DSets(as_group(f.domain), as_group(f.codomain), f.values)
        report = verify_counts(D)
        ok = report.ok
        summary = f"counts: {'pass' if ok else 'fail'} ({report.cases_checked} cases, goal qN^2 = {report.q * report.N ** 2})"
    else:  # pragma: no cover - argparse restricts choices
        raise InvalidInput(f"unknown check {what!r}")
    doc = {"format_version": FORMAT_VERSION, "kind": "report", **report.to_json()}
    if not ok:
        summary += f"; witness {json.dumps(doc['witnesses'][0] if doc['witnesses'] else None)}"
    _emit(doc, args, summary)
    return 0 if ok else 1


def cmd_counts(args) -> int:
    if args.p is None or args.m is None:
        raise InvalidInput("counts needs --p and --m")
    bounds = inequivalence_bounds(args.p, args.m, args.s)
    doc = {"format_version": FORMAT_VERSION, "kind": "counts", **bounds.to_json()}
    _emit(doc, args, f"binomial {bounds.binomial}, corollary {doc['corollary']}, remark4 {bounds.remark4}")
    return 0


def cmd_catalog(args) -> int:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "catalog",
        "groups": {
            "cyclic": "cyclic(n)",
            "elementary_abelian": "elementary_abelian(p,k)",
            "dihedral": "dihedral(2n)",
            "quaternion8": "quaternion8",
            "symmetric3": "symmetric3",
            "direct_product": "direct_product(A,B)",
        },
        "prequasifields": ["field(p,m)"] + sorted(PREQUASIFIELDS),
    }
    assert set(doc["groups"]) == set(CATALOG)
    if args.json:
        sys.stdout.write(dumps(doc))
    else:
        print("groups:")
        for usage in doc["groups"].values():
            print(f"  {usage}")
        print("prequasifields:")
        for name in doc["prequasifields"]:
            print(f"  {name}")
    return 0


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psbent", description="Partial spread and prequasifield bent functions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the JSON artifact here (atomically)")
        p.add_argument("--json", action="store_true", help="print the JSON artifact on stdout")

    p = sub.add_parser("construct-ps", help="bent function G -> H from a partitioned partial spread")
    p.add_argument("--p", type=int, help="characteristic of the desarguesian spread's field")
    p.add_argument("--m", type=int, help="degree of that field; G = GF(p^m) + GF(p^m)")
    p.add_argument("--prequasifield", help="use this prequasifield's spread instead (name or JSON file)")
    p.add_argument("--q", type=int, help="order of H (checked against --H)")
    p.add_argument("--H", required=True, help="codomain group, e.g. dihedral(8)")
    p.add_argument("--slopes", help="comma-separated slopes of sigma (integers or inf); default all")
    p.add_argument("--blocks", default="round-robin",
                   help="'round-robin' or ';'-separated blocks of slopes, in H element order")
    p.add_argument("--seed", type=int, default=0, help="recorded in the manifest only")
    common(p)
    p.set_defaults(func=cmd_construct_ps)

    p = sub.add_parser("construct-qf", help="bent function V -> K from a prequasifield")
    p.add_argument("--prequasifield", required=True, help="twisted9, field(p,m) or a JSON file")
    p.add_argument("--K-degree", dest="K_degree", type=int, default=1,
                   help="K = GF(p^d), embedded in the prequasifield's field (default 1)")
    p.add_argument("--g", default="round-robin",
                   help="'round-robin', 'seeded' (uses --seed) or a JSON file of values")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_construct_qf)

    p = sub.add_parser("verify", help="verify a function table")
    p.add_argument("what", choices=["bent-combinatorial", "bent-fourier", "rds", "scheme", "counts"])
    p.add_argument("input", nargs="?", help="function table JSON")
    p.add_argument("--T", help="weights of the linear functional K -> Z_p (default: trace)")
    p.add_argument("--p", type=int, help="counts without input: prime p")
    p.add_argument("--m", type=int, help="counts without input: m")
    p.add_argument("--s", type=int, default=1, help="counts without input: s (|H| = p^s)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counts", help="closed-form inequivalence bounds")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("catalog", help="list built-in groups and prequasifields")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog, out=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        sys.stderr.write(json.dumps(exc.detail, sort_keys=True) + "\n")
        return 2
    except INPUT_ERRORS as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
