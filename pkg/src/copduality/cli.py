"""copduality command line: check-copositive | immobile | analyze | gap | duffin.

Exit codes: 0 success / uniform duality / copositive, 1 no uniform duality /
not copositive, 2 bad input, 3 undecided.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import report
from .copositive import is_copositive, zero_set
from .duality import NO_UNIFORM, UNIFORM, analyze, duffin_fw
from .gap import duality_gap
from .immobile import VERIFIED, EMPTY, InconsistentSystem, find_immobile_set
from .model import (ProblemFormatError, _parse_hint, eval_constraint, load_problem, parse_rational)
from .sip import CutPool, SIPConfig

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2, 3


class InputError(ValueError):
    pass


def parse_vector(text: str, n: int, what: str, params=None) -> tuple[Fraction, ...]:
    try:
        vals = tuple(parse_rational(s.strip(), params) for s in text.split(",") if s.strip() != "")
    except (ValueError, ProblemFormatError) as exc:
        raise InputError(f"malformed {what}: {exc}") from None
    if len(vals) != n:
        raise InputError(f"{what} needs {n} entries, got {len(vals)}")
    return vals


def parse_params(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, val = item.partition("=")
        if not sep or not name.strip():
            raise InputError(f"--param expects name=value, got {item!r}")
        try:
            out[name.strip()] = parse_rational(val.strip())
        except (ValueError, ProblemFormatError) as exc:
            raise InputError(f"bad value for parameter {name}: {exc}") from None
    return out


def _config(args) -> SIPConfig:
    kw = {}
    if args.max_rounds is not None:
        kw["max_rounds"] = args.max_rounds
    if args.grid_start is not None:
        kw["grid_start"] = args.grid_start
    if args.box_bound is not None:
        kw["box_bound"] = parse_rational(args.box_bound)
    return SIPConfig(**kw)


def _load(args):
    try:
        system = load_problem(args.file, parse_params(args.param))
    except FileNotFoundError:
        raise InputError(f"no such problem file: {args.file}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {args.file}: {exc}") from None
    except ProblemFormatError as exc:
        raise InputError(str(exc)) from None
    hint_path = getattr(args, "immobile_hint", None)
    if hint_path:
        try:
            with open(hint_path) as fh:
                raw = json.load(fh)
            hint = _parse_hint(raw, system.p, system.parameters)
        except (OSError, json.JSONDecodeError, ProblemFormatError) as exc:
            raise InputError(f"bad immobile hint: {exc}") from None
        system = type(system)(system.matrices, system.name, system.parameters, system.metadata, hint)
    return system


def _emit(args, body: dict, text_lines):
    if args.format == "text":
        sys.stdout.write("\n".join(text_lines) + "\n")
    else:
        sys.stdout.write(report.dumps(body))


def _fmt(v):
    return "(" + ", ".join(str(a) for a in v) + ")" if v is not None else "-"


# -- subcommands ---------------------------------------------------------

def cmd_check_copositive(args) -> int:
    system = _load(args)
    x = parse_vector(args.x, system.n, "x", system.parameters) if args.x else (Fraction(0),) * system.n
    D = eval_constraint(system, x)
    res = is_copositive(D)
    zero = zero_set(D) if res.copositive else None
    body = {"problem": report.problem(system), "x": report.vec(x), **report.copositivity(D, res, zero)}
    lines = [f"A(x) at x = {_fmt(x)} is {'copositive' if res.copositive else 'NOT copositive'}",
             f"min t'A(x)t over the simplex = {res.minimum}"]
    if res.witness is not None:
        lines.append(f"witness t = {_fmt(res.witness)}")
    for z in body.get("zero_set") or ():
        lines.append(f"zero piece on support {z['support']}: vertices {z['closure_vertices']}")
    _emit(args, body, lines)
    return EXIT_OK if res.copositive else EXIT_NO


def cmd_immobile(args) -> int:
    system = _load(args)
    pool = CutPool(system, _config(args))
    imm = find_immobile_set(pool, hint=system.immobile_hint)
    body = {"problem": report.problem(system), "immobile": report.immobile(imm)}
    lines = [f"status: {imm.status}"]
    for s, J in enumerate(imm.pieces):
        lines.append(f"piece {s + 1}: conv{{{', '.join(_fmt(imm.vertices[j]) for j in J)}}}")
    if imm.sigma is not None:
        lines.append(f"sigma = {imm.sigma}")
    _emit(args, body, lines)
    return EXIT_OK if imm.status in (VERIFIED, EMPTY) else EXIT_UNDECIDED


def _verdict_code(overall: str) -> int:
    return {UNIFORM: EXIT_OK, NO_UNIFORM: EXIT_NO}.get(overall, EXIT_UNDECIDED)


def _verdict_lines(v) -> list:
    lines = [f"verdict: {v.overall}"]
    lines += [f"  {r}" for r in v.reasons]
    if v.index_sets is not None:
        for j in sorted(v.index_sets.M):
            lines.append(f"  j={j + 1}: M={list(v.index_sets.M[j])} N*={list(v.index_sets.Nstar[j])} "
                         f"N={list(v.index_sets.N[j])}")
    if v.condition_I is not None:
        c = v.condition_I
        lines.append(f"  condition I: {c.holds} (A1 {c.a1.holds}, B1 rank {c.b1.rank_A} vs {c.b1.rank_AB})")
        lines.append(f"  condition II: {v.condition_II_holds}")
    return lines


def cmd_analyze(args) -> int:
    system = _load(args)
    config = _config(args)
    v = analyze(system, config)
    body = {"problem": report.problem(system), "verdict": report.verdict(v)}
    lines = _verdict_lines(v)
    if args.cost:
        g = duality_gap(system, parse_vector(args.cost, system.n, "cost", system.parameters), config,
                        args.max_level, pool=v.pool)
        body["gap"] = report.gap(g)
        lines.append(f"gap: {g.gap} ({g.gap_kind})")
    if args.duffin:
        fw = duffin_fw(system, v.immobile, v.index_sets, v.min_active.x if v.min_active else v.immobile.x_bar,
                       v.cond2 if v.index_sets is not None else None)
        body["duffin"] = report.duffin(fw)
        lines.append(f"F/W checks pass: {fw.passes}")
    _emit(args, body, lines)
    return _verdict_code(v.overall)


def cmd_gap(args) -> int:
    system = _load(args)
    cost = parse_vector(args.cost, system.n, "cost", system.parameters)
    g = duality_gap(system, cost, _config(args), args.max_level)
    body = {"problem": report.problem(system), "gap": report.gap(g)}
    lines = [f"primal: {g.primal.status} {g.primal.value if g.primal.value is not None else ''}".rstrip(),
             f"dual (level {g.dual.level if g.dual else '-'}): "
             f"{g.dual.status if g.dual else '-'} {g.dual.value if g.dual and g.dual.value is not None else ''}".rstrip(),
             f"certified dual: {g.certified_dual}",
             f"gap: {g.gap} ({g.gap_kind})"]
    _emit(args, body, lines)
    return EXIT_OK


def cmd_duffin(args) -> int:
    system = _load(args)
    v = analyze(system, _config(args))
    if v.overall != UNIFORM:
        body = {"problem": report.problem(system), "verdict": v.overall, "reasons": list(v.reasons)}
        _emit(args, body, [f"verdict is {v.overall}; F/W sets are not available"] + [f"  {r}" for r in v.reasons])
        return _verdict_code(v.overall)
    x = v.min_active.x if v.min_active is not None else v.immobile.x_bar
    fw = duffin_fw(system, v.immobile, v.index_sets, x, v.cond2 if v.index_sets is not None else None)
    body = {"problem": report.problem(system), "verdict": v.overall, "duffin": report.duffin(fw)}
    lines = [f"F = {[_fmt(s) for _, s in fw.F]}",
             f"L-perp basis = {[_fmt(b) for b in fw.Lperp_basis]}",
             f"|W| = {len(fw.W)}",
             f"F on hyperplane: {fw.f_on_hyperplane}; W positive: {fw.w_positive}; "
             f"orthogonal: {fw.orthogonal}; cone inclusion: {fw.cone_inclusion}"]
    _emit(args, body, lines)
    return EXIT_OK if fw.passes else EXIT_NO


# -- parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem JSON file, or a bundled fixture name (ex1, ex2, ex3)")
    common.add_argument("--param", action="append", metavar="NAME=VALUE",
                        help="override a named parameter of the problem (repeatable)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="human-readable output")
    common.set_defaults(format="json")

    engine = argparse.ArgumentParser(add_help=False)
    engine.add_argument("--max-rounds", type=int, help="SIP rounds per solve")
    engine.add_argument("--grid-start", type=int, help="initial simplex grid denominator")
    engine.add_argument("--box-bound", help="box bound for the boxed relaxation (rational)")
    engine.add_argument("--immobile-hint", metavar="PATH", help="JSON list of polytopes believed to form T_im")

    ap = argparse.ArgumentParser(prog="copduality", description="Uniform LP duality for linear copositive systems")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-copositive", parents=[common], help="test A(x) for copositivity")
    p.add_argument("--x", help="comma-separated rationals (default 0)")
    p.set_defaults(func=cmd_check_copositive)

    p = sub.add_parser("immobile", parents=[common, engine], help="compute the immobile index set")
    p.set_defaults(func=cmd_immobile)

    p = sub.add_parser("analyze", parents=[common, engine], help="decide uniform LP duality")
    p.add_argument("--cost", help="also report the duality gap for this cost vector")
    p.add_argument("--max-level", type=int, default=3, help="finest dual grid level")
    p.add_argument("--duffin", action="store_true", help="include the F/W sets")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gap", parents=[common, engine], help="primal and dual values for a cost vector")
    p.add_argument("--cost", required=True, help="comma-separated rationals")
    p.add_argument("--max-level", type=int, default=3, help="finest dual grid level")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("duffin", parents=[common, engine], help="F/W sets when uniform duality holds")
    p.set_defaults(func=cmd_duffin)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if getattr(args, "max_level", 1) < 1:
            raise InputError("--max-level must be at least 1")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InconsistentSystem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
