"""Command-line front end.

Every command prints one report, JSON by default::

    effalg leq --effect nondet "bot" "or(top,bot)"
    effalg eval --effect prob "rec s. por(top, s)" --plot bounds.png

Exit status is 0 for decided answers, 2 for answers that only hold up to a
resolution or did not converge, and 1 for usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

from .dyadic import Dyadic
from .effects import EFFECT_NAMES, UnknownEffect, get_effect
from .involution import check_involution_preservation
from .modalities import modal_leq
from .proofs import DerivationError, DerivationFormatError, check_derivation, effect_for, load
from .quotient import QuotientError, build_quotient
from .relations import (AT_RESOLUTION, HOLDS, REFUTED, Decision, check_leq,
                        check_single_valued_instance)
from .relator import UnsupportedValueSpace, check_relator_laws
from .semantics import UnsupportedEvaluation, algebra, eval_bounds, eval_exact
from .syntax import ParseError, parse_tree, print_tree

EXIT_OK, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- serialization ----------------------------------------------------------------------

def _value(alg, v):
    if isinstance(v, tuple):  # (lower, upper) from bounds
        return {"lower": alg.format(v[0]), "upper": alg.format(v[1])}
    return alg.format(v)


def _assignment(alg, h: dict) -> dict:
    return {f"x{x}": _value(alg, v) for x, v in sorted(h.items())}


def _subst(f: dict) -> dict:
    return {f"x{x}": print_tree(t) for x, t in sorted(f.items())}


def _decision(report: dict, alg, d: Decision) -> int:
    report["result"] = d.status
    if d.witness is not None:
        report["witness"] = _assignment(alg, d.witness)
    if d.values is not None:
        report["values"] = [_value(alg, v) for v in d.values]
    if d.resolution is not None:
        report["resolution"] = d.resolution
    return EXIT_UNDECIDED if d.status == AT_RESOLUTION else EXIT_OK


def _text(report: dict) -> str:
    lines = []
    for k, v in report.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, ensure_ascii=False)
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


# --- arguments --------------------------------------------------------------------------

def _split_top(text: str) -> list[str]:
    """Split on commas outside brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_assign(effect, text: str | None) -> dict:
    if not text:
        return {}
    alg = algebra(effect)
    out = {}
    for item in _split_top(text):
        name, sep, val = item.partition("=")
        name = name.strip()
        if not sep or not (name.startswith("x") and name[1:].isdigit()):
            raise UsageError(f"bad assignment {item!r}; expected x<n>=VALUE")
        try:
            out[int(name[1:])] = alg.parse(val.strip())
        except (ValueError, ParseError) as exc:
            raise UsageError(f"bad value for {name}: {exc}") from None
    return out


def _tree(effect, text: str):
    try:
        return parse_tree(text, effect.signature)
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--effect", choices=EFFECT_NAMES)
    g.add_argument("--store-size", type=int, default=2, metavar="K")
    g.add_argument("--exceptions", default="e1,e2", metavar="E1,E2")
    g.add_argument("--grid", type=int, default=3, metavar="R")
    g.add_argument("--format", choices=("json", "text"), default="json")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--timings", action="store_true", help="include wall-clock time")

    p = _Parser(prog="effalg", description="Decide relations between effect trees.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    e = sub.add_parser("eval", parents=[common], help="evaluate a tree")
    e.add_argument("expr")
    e.add_argument("--depth", type=int, default=20)
    e.add_argument("--eps", default="1/2^20")
    e.add_argument("--assign", metavar="x0=VAL,...")
    e.add_argument("--plot", metavar="FILE", help="write the bounds convergence figure")

    for name, doc in [("leq", "decide EXPR1 ⊑ EXPR2"),
                      ("distinguish", "find an assignment separating two trees"),
                      ("single-valued", "substitution table against the full relation"),
                      ("modal-leq", "decide the modal preorder")]:
        q = sub.add_parser(name, parents=[common], help=doc)
        q.add_argument("lhs")
        q.add_argument("rhs")

    c = sub.add_parser("check-proof", parents=[common], help="check a derivation file")
    c.add_argument("file")
    qt = sub.add_parser("quotient", parents=[common], help="quotient closed trees")
    qt.add_argument("--depth", type=int, required=True)
    sub.add_parser("relator-laws", parents=[common], help="check the relator laws")
    inv = sub.add_parser("involution", parents=[common], help="check ¬ preservation")
    inv.add_argument("--samples", type=int, default=1000)
    return p


# --- commands ---------------------------------------------------------------------------

def _cmd_eval(args, effect, report) -> int:
    alg = algebra(effect)
    t = _tree(effect, args.expr)
    h = _parse_assign(effect, args.assign)
    try:
        eps = Dyadic.parse(args.eps)
    except ValueError as exc:
        raise UsageError(f"bad --eps: {exc}") from None
    if args.depth < 1:
        raise UsageError("--depth must be positive")
    report["params"].update(depth=args.depth, eps=str(eps))
    if args.plot and effect.name not in ("prob", "nondet_prob"):
        raise UsageError("--plot needs a prob or nondet_prob evaluation")

    bounds = None
    if args.plot:
        bounds = eval_bounds(effect, t, h, max_depth=args.depth, epsilon=eps)
        from .plotting import plot_bounds
        plot_bounds(bounds.trace, args.plot, title=args.expr)
        report["params"]["plot"] = args.plot

    try:
        v = eval_exact(effect, t, h)
    except UnsupportedEvaluation:
        bounds = bounds or eval_bounds(effect, t, h, max_depth=args.depth, epsilon=eps)
        report["result"] = "converged" if bounds.converged else "unconverged"
        report["values"] = {"lower": alg.format(bounds.lower),
                            "upper": alg.format(bounds.upper), "depth": bounds.depth}
        return EXIT_OK if bounds.converged else EXIT_UNDECIDED
    report["result"] = "exact"
    report["values"] = {"value": alg.format(v)}
    return EXIT_OK


def _cmd_leq(args, effect, report) -> int:
    a, b = _tree(effect, args.lhs), _tree(effect, args.rhs)
    return _decision(report, algebra(effect), check_leq(effect, a, b))


def _cmd_modal_leq(args, effect, report) -> int:
    a, b = _tree(effect, args.lhs), _tree(effect, args.rhs)
    return _decision(report, algebra(effect), modal_leq(effect, a, b))


def _cmd_distinguish(args, effect, report) -> int:
    alg = algebra(effect)
    a, b = _tree(effect, args.lhs), _tree(effect, args.rhs)
    fwd = check_leq(effect, a, b)
    bwd = check_leq(effect, b, a)
    for d, vals in ((fwd, fwd.values), (bwd, bwd.values and bwd.values[::-1])):
        if d.refuted:
            report["result"] = "distinguished"
            report["witness"] = _assignment(alg, d.witness)
            report["values"] = [_value(alg, v) for v in vals]
            if d.resolution is not None:
                report["resolution"] = d.resolution
            return EXIT_OK
    if fwd.decided and bwd.decided:
        report["result"] = "equivalent"
        return EXIT_OK
    report["result"] = AT_RESOLUTION
    report["resolution"] = fwd.resolution or bwd.resolution
    return EXIT_UNDECIDED


def _cmd_single_valued(args, effect, report) -> int:
    alg = algebra(effect)
    a, b = _tree(effect, args.lhs), _tree(effect, args.rhs)
    rep = check_single_valued_instance(effect, a, b)
    table = [{"subst": _subst(r.subst), "forward": r.forward.status,
              "backward": r.backward.status} for r in rep.rows]
    report["result"] = REFUTED if (rep.full.refuted or rep.full_backward.refuted) else (
        HOLDS if rep.full.decided and rep.full_backward.decided else AT_RESOLUTION)
    values: dict[str, Any] = {"table": table, "table_holds": rep.rows_hold("both")}
    for direction, d in (("forward", rep.full), ("backward", rep.full_backward)):
        if d.refuted:
            report["witness"] = _assignment(alg, d.witness)
            values["direction"] = direction
            values["full"] = [_value(alg, v) for v in d.values]
            if d.resolution is not None:
                report["resolution"] = d.resolution
            break
    else:
        if report["result"] == AT_RESOLUTION:
            report["resolution"] = rep.full.resolution
    report["values"] = values
    return EXIT_UNDECIDED if report["result"] == AT_RESOLUTION else EXIT_OK


def _cmd_check_proof(args, effect, report) -> int:
    try:
        d = load(args.file)
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    except (json.JSONDecodeError, DerivationFormatError, UnknownEffect) as exc:
        raise UsageError(f"bad derivation file {args.file}: {exc}") from None
    eff = effect_for(d)
    report["effect"] = eff.name
    report["params"] = eff.params
    report["values"] = {"lhs": print_tree(d.lhs), "rhs": print_tree(d.rhs),
                        "relation": d.relation}
    try:
        check_derivation(eff, d)
    except DerivationError as exc:
        report["result"] = "rejected"
        report["witness"] = {"step": exc.step, "reason": exc.reason}
        return EXIT_OK
    report["result"] = "ok"
    return EXIT_OK


def _cmd_quotient(args, effect, report) -> int:
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    report["params"]["depth"] = args.depth
    try:
        table = build_quotient(effect, args.depth)
    except QuotientError as exc:
        raise UsageError(str(exc)) from None
    n = len(table.classes)
    report["result"] = "ok"
    report["values"] = {
        "classes": [{"canonical": print_tree(c), "size": len(m)} for c, m in table.classes],
        "order": [[j for j in range(n) if table.leq(i, j)] for i in range(n)],
    }
    return EXIT_OK


def _cmd_relator_laws(args, effect, report) -> int:
    try:
        rep = check_relator_laws(effect)
    except UnsupportedValueSpace as exc:
        raise UsageError(str(exc)) from None
    report["params"].update(max_carrier=rep.max_carrier, max_depth=rep.max_depth)
    report["result"] = HOLDS if rep.total_violations == 0 else REFUTED
    report["values"] = {"checked": rep.checked,
                        "violations": {k: len(v) for k, v in rep.violations.items()}}
    for law, found in rep.violations.items():
        if found:
            report["witness"] = {"law": law, "instance": repr(found[0])}
            break
    return EXIT_OK


def _cmd_involution(args, effect, report) -> int:
    alg = algebra(effect)
    report["params"]["samples"] = args.samples
    rep = check_involution_preservation(effect, samples=args.samples, seed=args.seed)
    report["values"] = {
        "involutive_failures": len(rep.involutive_failures),
        "tree_order_failures": len(rep.tree_order_failures),
        "order_checked": rep.order_checked,
        "order_failures": len(rep.order_failures),
        "derived_checked": rep.derived_checked,
        "derived_failures": len(rep.derived_failures),
    }
    if rep.notice:
        report["result"] = "no_value_involution"
        report["values"]["notice"] = rep.notice
    elif not rep.finite_ok:
        report["result"] = "not_preserved"
    elif rep.regular_witness:
        report["result"] = "not_preserved_on_regular"
    else:
        report["result"] = "preserved"
    if rep.regular_witness:
        w = rep.regular_witness
        report["witness"] = {
            "tree": w["tree"],
            "value": _value(alg, w["value"]),
            "negated_tree_value": _value(alg, w["negated_tree_value"]),
            "negated_value": _value(alg, w["negated_value"]),
        }
    return EXIT_OK


COMMANDS = {
    "eval": _cmd_eval,
    "leq": _cmd_leq,
    "distinguish": _cmd_distinguish,
    "single-valued": _cmd_single_valued,
    "check-proof": _cmd_check_proof,
    "quotient": _cmd_quotient,
    "relator-laws": _cmd_relator_laws,
    "involution": _cmd_involution,
    "modal-leq": _cmd_modal_leq,
}


def run_command(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(list(argv))
        effect = None
        if args.command != "check-proof":
            if args.effect is None:
                raise UsageError(f"{args.command} needs --effect")
            try:
                effect = get_effect(args.effect, store_size=args.store_size,
                                    exceptions=_split_top(args.exceptions), grid=args.grid)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        report: dict[str, Any] = {
            "command": args.command,
            "effect": effect.name if effect else None,
            "params": dict(effect.params) if effect else {},
            "result": None,
        }
        code = COMMANDS[args.command](args, effect, report)
    except UsageError as exc:
        print(f"effalg: error: {exc}", file=stderr)
        return EXIT_USAGE

    ordered = {k: report[k] for k in ("command", "effect", "params", "result", "witness",
                                      "values", "resolution") if k in report}
    ordered["timings"] = {}
    if args.timings:
        ordered["timings"]["wall_ms"] = round((time.perf_counter() - started) * 1000, 3)
    if args.format == "json":
        stdout.write(json.dumps(ordered, indent=2, ensure_ascii=False) + "\n")
    else:
        stdout.write(_text(ordered))
    return code


def main(argv=None) -> None:
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
