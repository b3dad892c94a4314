"""Command-line front end.

Exit codes: 0 success/verified, 1 verification rejected (witness printed),
2 malformed input, 3 size bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import certificates, core, gstar, hardness, mincost, oracle, popularity
from .errors import (
    BoundExceededError,
    LimitExceededError,
    NotMaximumError,
    NotPopularError,
    ParseError,
    UnsupportedClauseError,
    ValidationError,
)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_BAD_INPUT = 2
EXIT_BOUND = 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(args, status: str, result, witness=None, text: str = ""):
    if args.json:
        envelope = {"status": status, "result": result}
        if witness is not None:
            envelope["witness"] = witness
        print(json.dumps(envelope, sort_keys=True))
    elif text:
        print(text, end="" if text.endswith("\n") else "\n")


def _witness_json(w: popularity.Witness) -> dict:
    return {"kind": w.kind, "nodes": list(w.nodes),
            "edges": [list(e) for e in w.edges], "weight": w.weight}


def _matching_text(inst, m) -> str:
    return core.serialize_matching(m)


def cmd_solve(args) -> int:
    inst = core.parse_instance(_read(args.instance))
    m = gstar.popular_max_matching(inst)
    _emit(args, "ok", core.matching_to_json(inst, m), text=_matching_text(inst, m))
    return EXIT_OK


def cmd_mincost(args) -> int:
    inst = core.parse_instance(_read(args.instance))
    res = mincost.min_cost_popular_max(inst)
    text = _matching_text(inst, res.matching)
    text += f"cost {res.cost}\n"
    text += certificates.serialize_certificate(inst, res.certificate)
    result = core.matching_to_json(inst, res.matching)
    result["certificate"] = {u: v for u, v in sorted(res.certificate.alpha.items())}
    _emit(args, "ok", result, text=text)
    return EXIT_OK


def _load_pair(args):
    inst = core.parse_instance(_read(args.instance))
    m = core.parse_matching(inst, _read(args.matching))
    return inst, m


def cmd_verify(args) -> int:
    inst, m = _load_pair(args)
    try:
        verdict = popularity.verify_popular_max(inst, m)
    except NotMaximumError:
        _, path = core.is_maximum(inst, m)
        text = "not maximum; augmenting path: " + " ".join(path)
        _emit(args, "rejected", {"popular": False, "maximum": False,
                                 "augmenting_path": path}, text=text)
        return EXIT_REJECTED
    if verdict.popular:
        _emit(args, "ok", {"popular": True}, text="popular")
        return EXIT_OK
    w = verdict.witness
    _emit(args, "rejected", {"popular": False}, _witness_json(w),
          text=popularity.format_witness(m, w))
    return EXIT_REJECTED


def cmd_certify(args) -> int:
    inst, m = _load_pair(args)
    try:
        cert = certificates.certify_popular_max(inst, m)
    except NotMaximumError:
        _, path = core.is_maximum(inst, m)
        _emit(args, "rejected", {"popular": False, "maximum": False,
                                 "augmenting_path": path},
              text="not maximum; augmenting path: " + " ".join(path))
        return EXIT_REJECTED
    except NotPopularError:
        verdict = popularity.verify_popular_max(inst, m)
        w = verdict.witness
        _emit(args, "rejected", {"popular": False}, _witness_json(w),
              text=popularity.format_witness(m, w))
        return EXIT_REJECTED
    _emit(args, "ok", {"alpha": {u: v for u, v in sorted(cert.alpha.items())},
                       "n0_prime": cert.n0_prime},
          text=certificates.serialize_certificate(inst, cert))
    return EXIT_OK


def cmd_pareto(args) -> int:
    inst, m = _load_pair(args)
    verdict = popularity.is_pareto_optimal(inst, m)
    if verdict.pareto:
        _emit(args, "ok", {"pareto_optimal": True}, text="pareto-optimal")
        return EXIT_OK
    w = verdict.witness
    _emit(args, "rejected", {"pareto_optimal": False}, _witness_json(w),
          text=popularity.format_witness(m, w))
    return EXIT_REJECTED


def cmd_emit_lp(args) -> int:
    inst = core.parse_instance(_read(args.instance))
    text = mincost.emit_lp(inst)
    _emit(args, "ok", {"lp": text}, text=text)
    return EXIT_OK


def cmd_gstar(args) -> int:
    inst = core.parse_instance(_read(args.instance))
    gs = gstar.build_gstar(inst)
    text = core.serialize_instance(gs.inner)
    _emit(args, "ok", {"instance": text, "n0": gs.n0}, text=text)
    return EXIT_OK


def cmd_gen_random(args) -> int:
    cost_range = None
    if args.cost_hi is not None:
        cost_range = (args.cost_lo, args.cost_hi)
    inst = core.random_instance(args.na, args.nb, args.density, args.seed, cost_range)
    text = core.serialize_instance(inst)
    _emit(args, "ok", {"instance": text}, text=text)
    return EXIT_OK


def _load_formula(args) -> hardness.CnfFormula:
    f = hardness.parse_dimacs(_read(args.cnf))
    if args.pad_units:
        f = hardness.pad_unit_clauses(f)
    return f


def cmd_gen_hardness(args) -> int:
    f = _load_formula(args)
    g = hardness.build_gadget_instance(hardness.transform_formula(f))
    text = core.serialize_instance(g.instance)
    _emit(args, "ok", {"instance": text}, text=text)
    return EXIT_OK


def cmd_check_reduction(args) -> int:
    f = _load_formula(args)
    report = hardness.check_reduction(f, max_vars=args.max_vars, max_clauses=args.max_clauses)
    result = {k: getattr(report, k) for k in (
        "satisfiable", "cost0_pareto_exists", "candidates_checked", "canonical_iff_ok",
        "converse_ok", "perfect_ok", "consistency_ok", "falsifying_cycles_ok",
        "gadget_nodes", "gadget_edges")}
    result["equivalence_holds"] = report.equivalence_holds
    _emit(args, "ok" if report.equivalence_holds else "rejected", result, text=str(report))
    return EXIT_OK if report.equivalence_holds else EXIT_REJECTED


def _matchings_text(ms) -> str:
    lines = [json.dumps([list(e) for e in sorted(m.pairs)]) for m in ms]
    return "\n".join(lines) + ("\n" if lines else "")


def cmd_oracle(args) -> int:
    inst = core.parse_instance(_read(args.instance))
    if args.what == "matchings":
        ms = sorted(oracle.enum_matchings(inst, args.bound), key=lambda m: sorted(m.pairs))
        _emit(args, "ok", [[list(e) for e in sorted(m.pairs)] for m in ms],
              text=_matchings_text(ms))
    elif args.what == "max-matchings":
        ms = sorted(oracle.enum_max_matchings(inst, args.bound), key=lambda m: sorted(m.pairs))
        _emit(args, "ok", [[list(e) for e in sorted(m.pairs)] for m in ms],
              text=_matchings_text(ms))
    elif args.what == "popular-max":
        ms = sorted(oracle.brute_popular_max(inst, args.bound), key=lambda m: sorted(m.pairs))
        _emit(args, "ok", [[list(e) for e in sorted(m.pairs)] for m in ms],
              text=_matchings_text(ms))
    elif args.what == "min-cost":
        m, cost = oracle.brute_min_cost_popular_max(inst, args.bound)
        result = core.matching_to_json(inst, m)
        _emit(args, "ok", result, text=_matching_text(inst, m) + f"cost {cost}\n")
    elif args.what == "unpopularity":
        m = core.parse_matching(inst, _read(args.matching))
        u = oracle.brute_unpopularity_factor(inst, m, args.bound)
        if u == float("inf"):
            text = "inf"
        elif isinstance(u, Fraction) and u.denominator != 1:
            text = f"{u.numerator}/{u.denominator}"
        else:
            text = str(int(u))
        _emit(args, "ok", {"unpopularity_factor": text}, text=text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="popmax",
        description="Popular maximum matchings: solve, verify, certify, optimize.")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable {status, result, witness?} envelope")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a popular max-matching")
    p.add_argument("instance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mincost", help="min-cost popular max-matching with certificate")
    p.add_argument("instance")
    p.set_defaults(func=cmd_mincost)

    for name, func, help_text in (
            ("verify", cmd_verify, "verify a matching is a popular max-matching"),
            ("certify", cmd_certify, "produce a dual certificate for a matching"),
            ("pareto", cmd_pareto, "check Pareto-optimality of a matching")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("instance")
        p.add_argument("matching")
        p.set_defaults(func=func)

    p = sub.add_parser("emit-lp", help="emit the extended LP formulation")
    p.add_argument("instance")
    p.set_defaults(func=cmd_emit_lp)

    p = sub.add_parser("gstar", help="serialize the derived auxiliary instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_gstar)

    p = sub.add_parser("gen-random", help="generate a random instance")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cost-lo", type=int, default=0)
    p.add_argument("--cost-hi", type=int, default=None)
    p.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("gen-hardness", help="generate the reduction gadget instance")
    p.add_argument("cnf")
    p.add_argument("--pad-units", action="store_true",
                   help="pad 1-literal clauses to (l or l) before transforming")
    p.set_defaults(func=cmd_gen_hardness)

    p = sub.add_parser("check-reduction", help="confirm the reduction equivalence (tiny inputs)")
    p.add_argument("cnf")
    p.add_argument("--pad-units", action="store_true")
    p.add_argument("--max-vars", type=int, default=4)
    p.add_argument("--max-clauses", type=int, default=6)
    p.set_defaults(func=cmd_check_reduction)

    p = sub.add_parser("oracle", help="exponential ground-truth routines (desk scale)")
    p.add_argument("what", choices=["matchings", "max-matchings", "popular-max",
                                    "min-cost", "unpopularity"])
    p.add_argument("instance")
    p.add_argument("matching", nargs="?")
    p.add_argument("--bound", type=int, default=oracle.DEFAULT_BOUND)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", "") == "oracle" and args.what == "unpopularity" \
            and not args.matching:
        parser.error("oracle unpopularity needs a MATCHFILE")
    try:
        return args.func(args)
    except (ParseError, ValidationError, UnsupportedClauseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"status": "error", "result": str(exc)}))
        return EXIT_BAD_INPUT
    except (BoundExceededError, LimitExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"status": "error", "result": str(exc)}))
        return EXIT_BOUND
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
