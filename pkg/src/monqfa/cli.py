"""``monqfa`` command line: simulation, constructions, decisions, logic."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .builders import (BuildError, build_basis_automaton, linear_representation, parse_event)
from .decide import DecideError, is_lmo, synthesize
from .dfa import Dfa, DfaError, compile_regex, minimize, variation_sup
from .linalg import LinalgError, is_projector, vec_norm2
from .logic import LogicError, compile_formula
from .monoid import MonoidError, format_report, report, transition_monoid
from .qfa import MOnQFA, QfaError, accept_prob, accept_prob_branches

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(x) -> str:
    """Exact rationals as ``p/q``; everything else as a decimal."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _emit(args, data: dict, text: str):
    if args.json:
        print(json.dumps(data, indent=2, default=str))
    else:
        print(text)


# -- loading -------------------------------------------------------------------------

def load_qfa(path: str, exact: bool = False) -> MOnQFA:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    a = MOnQFA.from_json(text, exact=True if exact else None)
    if exact and not a.exact:
        raise UsageError(f"{path} contains non-rational entries")
    return a


def load_dfa(source: str, alphabet: str | None = None) -> Dfa:
    """A DFA interchange file, or else a regex over ``alphabet``."""
    path = Path(source)
    if path.suffix == ".json" or path.is_file():
        try:
            return Dfa.from_json(path.read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc.strerror}") from None
    return compile_regex(source, alphabet)


# -- verbs ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    a = load_qfa(args.qfa, args.exact)
    p = accept_prob(a, args.word)
    data = {"word": args.word, "probability": fmt(p)}
    if args.branches:
        q = accept_prob_branches(a, args.word)
        data["branches"] = fmt(q)
        data["agree"] = (q == p) if a.exact else abs(float(p) - float(q)) <= a.tol
    if a.meta is not None:
        data["accepted"] = p > a.meta.cutpoint
    text = fmt(p)
    if args.branches:
        text += f"\nbranches: {data['branches']} ({'agree' if data['agree'] else 'DISAGREE'})"
    _emit(args, data, text)
    return EXIT_OK if not args.branches or data["agree"] else EXIT_NEGATIVE


def cmd_build_basis(args) -> int:
    a = build_basis_automaton(args.seq, tuple(sorted(set(args.alphabet))))
    out = a.to_json()
    if args.output:
        Path(args.output).write_text(out + "\n")
        _emit(args, {"written": args.output, "dim": a.dim,
                     "cutpoint": fmt(a.meta.cutpoint), "isolation": fmt(a.meta.isolation)},
              f"wrote {args.output} (dim {a.dim}, cut-point {a.meta.cutpoint}, isolation {a.meta.isolation})")
    else:
        print(out)
    return EXIT_OK


def cmd_combine(args) -> int:
    try:
        raw = Path(args.expr).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.expr}: {exc.strerror}") from None
    alphabet, text = args.alphabet, raw
    if raw.lstrip().startswith("{"):
        doc = json.loads(raw)
        text = doc["expr"]
        alphabet = alphabet or "".join(doc["alphabet"])
    if not alphabet:
        raise UsageError("the event alphabet is unknown: pass --alphabet or use a JSON expression file")
    base = Path(args.expr).parent
    ev = parse_event(text, alphabet, loader=lambda f: load_qfa(str(base / f), args.exact))
    v = ev.value(args.word)
    data = {"word": args.word, "value": fmt(v)}
    if ev.meta is not None:
        data["cutpoint"] = fmt(ev.meta.cutpoint)
        data["isolation"] = fmt(ev.meta.isolation)
        data["accepted"] = v > ev.meta.cutpoint
    _emit(args, data, fmt(v))
    return EXIT_OK


def cmd_linrep(args) -> int:
    a = load_qfa(args.qfa, args.exact)
    rep = linear_representation(a)
    tol = 0 if rep.xi.exact else a.tol
    xi_norm = vec_norm2(rep.xi)
    eta_norm = vec_norm2(rep.eta)
    checks = {
        "xi_unit": abs(float(xi_norm) - 1) <= max(tol, 1e-12) if not isinstance(xi_norm, Fraction) else xi_norm == 1,
        "letters_are_projectors": all(is_projector(p, tol) for p in rep.letters.values()),
        "eta_bounded": float(eta_norm) ** 2 <= a.dim + 1e-12,
    }
    data = {
        "xi": rep.xi.to_literal()[0],
        "letters": {c: p.to_literal() for c, p in rep.letters.items()},
        "eta": rep.eta.to_literal()[0],
        "norms": {"xi": fmt(xi_norm), "eta": fmt(eta_norm), "sqrt_dim_bound": fmt(a.dim ** 0.5)},
        "checks": checks,
    }
    lines = [f"dimension {rep.xi.cols} (= {a.dim}^2)",
             f"|xi| = {fmt(xi_norm)}", f"|eta| = {fmt(eta_norm)} (bound sqrt({a.dim}))"]
    lines += [f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items()]
    if not args.json:
        lines.append("(use --json for the full matrices)")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if all(checks.values()) else EXIT_NEGATIVE


def cmd_decide(args) -> int:
    d = load_dfa(args.dfa, args.alphabet)
    v = is_lmo(d, args.strategy)
    data = v.to_dict()
    lines = [f"member: {'yes' if v.member else 'no'}",
             f"literally idempotent: {'yes' if v.literally_idempotent else 'no'}",
             f"J-trivial: {'yes' if v.j_trivial else 'no'}"]
    if v.idempotency_witness:
        q, c = v.idempotency_witness
        long_w, short_w, in_long, in_short = v.word_pair
        lines.append(f"witness: state {q}, letter {c}: {long_w!r} {'in' if in_long else 'not in'} L, "
                     f"{short_w!r} {'in' if in_short else 'not in'} L")
    if v.j_witness:
        c = v.j_witness
        e = lambda w: w or "ε"  # noqa: E731
        lines.append(f"J-class witness: [{e(c.word_a)}] = [{e(c.left_ab)}·{e(c.word_b)}·{e(c.right_ab)}], "
                     f"[{e(c.word_b)}] = [{e(c.left_ba)}·{e(c.word_a)}·{e(c.right_ba)}]")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if v.member else EXIT_NEGATIVE


def cmd_monoid(args) -> int:
    d = minimize(load_dfa(args.dfa, args.alphabet))
    rep = report(transition_monoid(d, args.limit))
    _emit(args, rep, format_report(rep))
    return EXIT_OK


def cmd_variation(args) -> int:
    d = minimize(load_dfa(args.dfa, args.alphabet))
    v = variation_sup(d)
    _emit(args, {"variation": v}, str(v))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    d = load_dfa(args.dfa, args.alphabet)
    verdict = is_lmo(d)
    if not verdict.member:
        _emit(args, {"member": False, **verdict.to_dict()}, "not in the class: nothing to synthesize")
        return EXIT_NEGATIVE
    res = synthesize(d, check_len=args.check_len, k_max=args.k_max)
    data = {"member": True, **res.to_dict()}
    lines = [f"expression: {res.decomposition.expr} (profile length {res.decomposition.k})",
             f"leaves: {res.leaves}, copies per leaf: {res.copies}",
             f"declared cut-point {fmt(res.declared_cutpoint)}, isolation {float(res.declared_isolation):.6g}",
             f"measured isolation on words up to length {res.check_len}: {float(res.measured_isolation):.6g}",
             "classification agrees with the DFA" if res.agrees
             else f"DISAGREES on {len(res.mismatches)} words, e.g. {res.mismatches[:5]}"]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if res.agrees else EXIT_NEGATIVE


def cmd_logic_compile(args) -> int:
    d = compile_formula(args.formula, args.alphabet)
    if args.output:
        Path(args.output).write_text(d.to_json() + "\n")
        print(f"wrote {args.output} ({d.n} states)")
    else:
        print(d.to_json())
    return EXIT_OK


def cmd_check_invariants(args) -> int:
    from .invariants import run_invariants

    results = run_invariants(args.seed, args.samples)
    data = {"seed": args.seed, "samples": args.samples,
            "checks": [{"name": r.name, "checked": r.checked, "ok": r.ok, "failures": r.failures}
                       for r in results]}
    lines = [f"{'PASS' if r.ok else 'FAIL'} {r.name} ({r.checked} cases)" for r in results]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if all(r.ok for r in results) else EXIT_NEGATIVE


# -- wiring --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--exact", action="store_true", help="require rational inputs and exact arithmetic")

    p = _Parser(prog="monqfa", description="Measure-only quantum finite automata toolkit.",
                epilog="The default float tolerance comes from MONQFA_TOL "
                       f"(currently {os.environ.get('MONQFA_TOL', '1e-9')}).")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="acceptance probability of a word")
    s.add_argument("qfa")
    s.add_argument("word", nargs="?", default="")
    s.add_argument("--branches", action="store_true", help="cross-check by branch enumeration")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("build-basis", parents=[common], help="basis automaton for a letter sequence")
    s.add_argument("seq")
    s.add_argument("--alphabet", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_build_basis)

    s = sub.add_parser("combine", parents=[common], help="evaluate an event expression")
    s.add_argument("expr", help="file holding the expression (text or JSON with alphabet/expr)")
    s.add_argument("word", nargs="?", default="")
    s.add_argument("--alphabet")
    s.set_defaults(func=cmd_combine)

    s = sub.add_parser("linrep", parents=[common], help="linear representation and norm checks")
    s.add_argument("qfa")
    s.set_defaults(func=cmd_linrep)

    for name, func, helptext in (("decide", cmd_decide, "membership verdict with witnesses"),
                                 ("monoid", cmd_monoid, "syntactic monoid report"),
                                 ("variation", cmd_variation, "supremum of the variation"),
                                 ("synthesize", cmd_synthesize, "build and check a recognizing event")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("dfa", help="DFA file or regex")
        s.add_argument("--alphabet", help="alphabet for regex input (default: letters of the regex)")
        s.set_defaults(func=func)
        if name == "decide":
            s.add_argument("--strategy", choices=("monoid", "graph"), default="monoid")
        if name == "monoid":
            s.add_argument("--limit", type=int, default=50_000)
        if name == "synthesize":
            s.add_argument("--check-len", type=int, default=8)
            s.add_argument("--k-max", type=int, default=6)

    s = sub.add_parser("logic-compile", parents=[common], help="compile an easy formula to a DFA")
    s.add_argument("formula")
    s.add_argument("--alphabet", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_logic_compile)

    s = sub.add_parser("check-invariants", parents=[common], help="randomized property corpus")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=200)
    s.set_defaults(func=cmd_check_invariants)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"monqfa: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (QfaError, LinalgError, BuildError, DfaError, MonoidError, DecideError, LogicError,
            json.JSONDecodeError, KeyError) as exc:
        print(f"monqfa: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
