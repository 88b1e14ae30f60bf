"""Command-line driver: ``varsat <command> <theory> [...]``.

Exit status is 0 for Sat, Valid or a passing check, 1 for Unsat, Invalid or
a failing check, and 2 for errors and exceeded bounds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .diophantine import DiophantineLimit
from .finite import compute_finite_sorts
from .oracle import brute_force_sat
from .parser import load_theory, parse_equations, parse_formula, parse_term
from .patterns import check_pattern_equivalences
from .printer import subst_json, subst_str, term_str, theory_str
from .rewrite import StepLimitExceeded
from .sat import SAT, VALID, Decider, Stats, TraceStep, Verdict
from .selectors import selector_transform
from .terms import term_vars
from .theory import Theory, TheoryError
from .unify import UnificationLimit
from .validate import validate_theory
from .variants import COMPLETE, Bounds, VariantEngine, fvp_check
from .varunify import BoundExceeded, var_unify

OK, FAIL, ERROR = 0, 1, 2

BUNDLED = Path(__file__).resolve().parents[2] / "theories"


def resolve_theory(name: str) -> Path:
    """A path as given, with ``.vsat`` appended, or a bundled fixture of that name."""
    candidates = [Path(name), Path(name + ".vsat"), BUNDLED / name, BUNDLED / (name + ".vsat")]
    for c in candidates:
        if c.is_file():
            return c
    raise FileNotFoundError(f"theory file {name!r} not found")


class Output:
    """Collects the JSON document and the human-readable lines of one run."""

    def __init__(self, args: argparse.Namespace):
        self.json = args.json
        self.show_trace = args.trace
        self.doc: dict[str, Any] = {"verdict": None, "trace": [], "stats": Stats().to_json()}
        self.lines: list[str] = []
        self.trace: list[TraceStep] = []

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def finish(self, verdict: str, code: int, stats: Stats | None = None, **extra: Any) -> int:
        self.doc["verdict"] = verdict
        self.doc["trace"] = [t.to_json() for t in self.trace]
        if stats is not None:
            self.doc["stats"] = stats.to_json()
        self.doc.update(extra)
        if self.json:
            print(json.dumps(self.doc, indent=2))
        else:
            if self.show_trace:
                for t in self.trace:
                    print(t)
            for line in self.lines:
                print(line)
        return code


def _bounds(args: argparse.Namespace) -> Bounds:
    return Bounds(max_depth=args.max_depth, max_nodes=args.max_nodes)


def _engine(theory: Theory, args: argparse.Namespace) -> VariantEngine:
    return VariantEngine(theory.rules, theory.rewriter, theory.unifier, _bounds(args))


def _stats(theory: Theory, engine: VariantEngine, nodes: int) -> Stats:
    return Stats(nodes, theory.rewriter.rewrites, engine.unifiers_computed)


# --- commands ----------------------------------------------------------------

def cmd_check(theory: Theory, args, out: Output) -> int:
    table = compute_finite_sorts(theory)
    report = validate_theory(theory, finite_table=table)
    for d in report.diagnostics:
        out.say(f"{d.severity}: {d}")
    if not report.ok:
        return out.finish("Invalid theory", ERROR, validation=report.to_json())
    engine = _engine(theory, args)
    fvp = fvp_check(engine, theory.signature.ops.values())
    nodes = 0
    for s in fvp.symbols:
        nodes += s.nodes
        lines = [f"{term_str(v.term)} with {subst_str(v.subst)}" for v in s.variants]
        out.trace.append(TraceStep("narrow", s.op, term_str(s.source), lines,
                                   {"status": s.status, "variants": s.count, "nodes": s.nodes}))
        if s.status == COMPLETE:
            out.say(f"  {s.op}: {s.count} variants")
        else:
            out.say(f"  {s.op}: not FVP up to bound ({s.count} incomparable variants after "
                    f"{s.nodes} nodes)")
            for line in lines:
                out.say(f"      {line}")
    symbols = {s.op: {"status": s.status, "variants": s.count} for s in fvp.symbols}
    out.say("finite sorts: " + (", ".join(table.finite_sorts) or "none"))
    extra = {"validation": report.to_json(), "symbols": symbols, "finite_sorts": table.to_json()}
    stats = _stats(theory, engine, nodes)
    if not fvp.fvp:
        bad = [s.op for s in fvp.symbols if s.status != COMPLETE]
        out.say(f"NOT FVP up to bound: {', '.join(bad)}")
        return out.finish("NotFVPUpToBound", ERROR, stats, **extra)
    out.say(f"FVP, variant complexity {fvp.complexity}")
    extra["complexity"] = fvp.complexity
    if theory.patterns:
        pr = check_pattern_equivalences(theory, args.pattern_depth)
        extra["patterns"] = pr.to_json()
        for p in pr.predicates:
            status = "pass" if p.ok else "FAIL"
            out.say(f"patterns {p.pred}: {status} at depth {pr.depth}")
            for c in p.counterexamples:
                out.say(f"      {c}")
        if not pr.ok:
            return out.finish("PatternsFail", FAIL, stats, **extra)
    return out.finish("FVP", OK, stats, **extra)


def cmd_normalize(theory: Theory, args, out: Output) -> int:
    t = parse_term(theory, args.term)
    nf = theory.normalize(t)
    out.say(term_str(nf))
    return out.finish("Normalized", OK, Stats(0, theory.rewriter.rewrites, 0), result=term_str(nf))


def cmd_variants(theory: Theory, args, out: Output) -> int:
    t = parse_term(theory, args.term)
    engine = _engine(theory, args)
    res = engine.narrow(t, fresh=theory.fresh(t))
    vs = res.variants
    if args.constructor:
        vs = [v for v in vs if theory.is_ctor_term(v.term)]
    lines = [f"{term_str(v.term)} with {subst_str(v.subst)}" for v in vs]
    for line in lines:
        out.say(line)
    stats = _stats(theory, engine, res.nodes)
    payload = [{"term": term_str(v.term), "substitution": subst_json(v.subst)} for v in vs]
    if not res.complete:
        out.say(f"bound exceeded after {res.nodes} nodes; {len(vs)} variants so far")
        return out.finish("BoundExceeded", ERROR, stats, variants=payload)
    out.say(f"{len(vs)} variants")
    return out.finish("Complete", OK, stats, variants=payload, count=len(vs))


def cmd_unify(theory: Theory, args, out: Output) -> int:
    eqs = parse_equations(theory, args.system)
    engine = _engine(theory, args)
    vs = {v for e in eqs for t in e for v in term_vars(t)}
    unifiers = var_unify(engine, eqs, theory.fresh(*[t for e in eqs for t in e]), away=vs)
    for u in unifiers:
        out.say(subst_str(u))
    out.say(f"{len(unifiers)} unifiers")
    code = OK if unifiers else FAIL
    return out.finish("Unifiable" if unifiers else "NotUnifiable", code,
                      _stats(theory, engine, 0), unifiers=[subst_json(u) for u in unifiers])


def _decide(theory: Theory, args, out: Output, mode: str) -> int:
    f = parse_formula(theory, args.formula)
    d = Decider(theory, _bounds(args))
    v: Verdict = d.valid(f) if mode == "valid" else d.satisfiable(f)
    if v.witness is not None and not args.no_verify:
        from .oracle import verify_witness
        target = f if mode == "sat" else _negation(f)
        v.witness.ground = verify_witness(theory, target, v.witness.subst, v.witness.diseqs,
                                          args.verify_depth)
    out.trace = v.trace
    out.say(v.status)
    if v.witness is not None:
        label = "witness" if mode == "sat" else "counterexample"
        out.say(f"{label}: {v.witness}")
    good = SAT if mode == "sat" else VALID
    extra: dict[str, Any] = {}
    if v.witness is not None:
        extra["witness"] = v.witness.to_json()
    return out.finish(v.status, OK if v.status == good else FAIL, v.stats, **extra)


def _negation(f):
    from .formula import Not
    return Not(f)


def cmd_sat(theory, args, out):
    return _decide(theory, args, out, "sat")


def cmd_valid(theory, args, out):
    return _decide(theory, args, out, "valid")


def cmd_oracle_sat(theory: Theory, args, out: Output) -> int:
    f = parse_formula(theory, args.formula)
    r = brute_force_sat(theory, f, args.depth, args.cap)
    out.say(f"{r.status} (depth {r.depth}, {r.checked} of {r.space} assignments checked)")
    extra: dict[str, Any] = {"checked": r.checked, "space": r.space, "depth": r.depth}
    if r.witness is not None:
        out.say(f"witness: {subst_str(r.witness)}")
        extra["witness"] = {"ground": subst_json(r.witness)}
    code = {"Witness": OK, "NoWitnessUpToDepth": FAIL}.get(r.status, ERROR)
    return out.finish(r.status, code, **extra)


def cmd_selectors(theory: Theory, args, out: Output) -> int:
    new = selector_transform(theory, args.name)
    text = theory_str(new)
    out.say(text.rstrip("\n"))
    return out.finish("Transformed", OK, theory=text)


COMMANDS = {
    "check": cmd_check, "normalize": cmd_normalize, "variants": cmd_variants,
    "unify": cmd_unify, "sat": cmd_sat, "valid": cmd_valid,
    "oracle-sat": cmd_oracle_sat, "selectors": cmd_selectors,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--trace", action="store_true", help="print the step trace")
    common.add_argument("--max-depth", type=int, default=10, help="narrowing depth bound")
    common.add_argument("--max-nodes", type=int, default=10_000, help="narrowing node bound")

    p = argparse.ArgumentParser(prog="varsat", description=(
        "Variant-based satisfiability in initial algebras with predicates."))
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="validate, check FVP and patterns")
    c.add_argument("theory")
    c.add_argument("--pattern-depth", type=int, default=3)

    c = sub.add_parser("normalize", parents=[common], help="normalize a term")
    c.add_argument("theory")
    c.add_argument("term")

    c = sub.add_parser("variants", parents=[common], help="most general variants of a term")
    c.add_argument("theory")
    c.add_argument("term")
    c.add_argument("--constructor", action="store_true", help="keep constructor variants only")

    c = sub.add_parser("unify", parents=[common], help="variant unifiers of a conjunction of equations")
    c.add_argument("theory")
    c.add_argument("system")

    for name, help_ in (("sat", "decide satisfiability"), ("valid", "decide inductive validity")):
        c = sub.add_parser(name, parents=[common], help=help_)
        c.add_argument("theory")
        c.add_argument("formula")
        c.add_argument("--verify-depth", type=int, default=3,
                       help="depth for grounding the witness with the oracle")
        c.add_argument("--no-verify", action="store_true", help="skip witness grounding")

    c = sub.add_parser("oracle-sat", parents=[common], help="brute-force ground search")
    c.add_argument("theory")
    c.add_argument("formula")
    c.add_argument("--depth", type=int, default=3)
    c.add_argument("--cap", type=int, default=1_000_000)

    c = sub.add_parser("selectors", parents=[common], help="selector and sort-predicate transform")
    c.add_argument("theory")
    c.add_argument("--name", default=None)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Output(args)
    try:
        theory = load_theory(str(resolve_theory(args.theory)))
        return COMMANDS[args.command](theory, args, out)
    except BoundExceeded as e:
        out.say(f"error: not FVP up to bound: {e}")
        return _error(out, "BoundExceeded", str(e))
    except TheoryError as e:
        out.say("error: " + str(e))
        return _error(out, "Error", str(e), [d.to_json() for d in e.diagnostics])
    except (FileNotFoundError, StepLimitExceeded, UnificationLimit, DiophantineLimit,
            OverflowError) as e:
        out.say(f"error: {e}")
        return _error(out, "Error", str(e))


def _error(out: Output, verdict: str, message: str, diagnostics: list | None = None) -> int:
    extra: dict[str, Any] = {"error": message}
    if diagnostics:
        extra["diagnostics"] = diagnostics
    if not out.json:
        # human-readable errors go to stderr
        for line in out.lines:
            print(line, file=sys.stderr)
        return ERROR
    return out.finish(verdict, ERROR, **extra)


if __name__ == "__main__":
    sys.exit(main())
