"""Surface-syntax printing of terms, formulas, substitutions and theories."""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from .formula import And, Atom, Clause, Formula, Iff, Implies, Not, Or
from .terms import Op, Term, Var, term_key


def _parts(op: Op) -> list[str]:
    return [p for p in op.name.split("_") if p]


def _postfix_token(op: Op) -> str:
    # ":NeList" prints as ": NeList" so it cannot lex as an inline variable
    return " ".join(re.findall(r"[A-Za-z0-9][A-Za-z0-9'#$@]*|[^A-Za-z0-9\s]+", _parts(op)[0]))


def term_str(t: Term, show_sorts: bool = False) -> str:
    return _term(t, 10**9, show_sorts)


def _term(t: Term, limit: int, show_sorts: bool) -> str:
    if isinstance(t, Var):
        return f"{t.name}:{t.sort}" if show_sorts else t.name
    op = t.op
    if not t.args:
        return op.name
    if op.is_infix and (op.arity == 2):
        tok = _parts(op)[0]
        inner = op.prec if op.assoc else op.prec - 1
        if op.is_ac:
            s = f" {tok} ".join(_term(a, inner, show_sorts) for a in t.args)
        else:
            a, b = t.args
            s = f"{_term(a, op.prec, show_sorts)} {tok} {_term(b, inner, show_sorts)}"
        return f"({s})" if op.prec > limit else s
    if op.is_postfix and op.arity == 1:
        s = f"{_term(t.args[0], op.prec, show_sorts)} {_postfix_token(op)}"
        return f"({s})" if op.prec > limit else s
    return f"{op.name}({', '.join(_term(a, 10**9 if op.arity == 1 else 120, show_sorts) for a in t.args)})"


def raw_instance_str(t: Term, sigma: Mapping[Var, Term]) -> str:
    """Print ``t sigma`` without re-canonicalizing (identity elements stay visible)."""
    return _raw(t, sigma, 10**9)


def _raw(t: Term, sigma: Mapping[Var, Term], limit: int) -> str:
    if isinstance(t, Var):
        val = sigma.get(t)
        return _term(val, limit, False) if val is not None else t.name
    op = t.op
    if not t.args:
        return op.name
    if op.is_infix and op.arity == 2:
        tok = _parts(op)[0]
        inner = op.prec if op.assoc else op.prec - 1
        if op.is_ac:
            # identities introduced by sigma go last, as in hand-written traces
            args = sorted(t.args, key=lambda a: isinstance(a, Var) and sigma.get(a) is op.identity
                          and op.identity is not None)
            s = f" {tok} ".join(_raw(a, sigma, inner) for a in args)
        else:
            a, b = t.args
            s = f"{_raw(a, sigma, op.prec)} {tok} {_raw(b, sigma, inner)}"
        return f"({s})" if op.prec > limit else s
    if op.is_postfix and op.arity == 1:
        s = f"{_raw(t.args[0], sigma, op.prec)} {_postfix_token(op)}"
        return f"({s})" if op.prec > limit else s
    return f"{op.name}({', '.join(_raw(a, sigma, 120) for a in t.args)})"


def pair_str(lhs: Term, rhs: Term, positive: bool) -> str:
    rel = "=" if positive else "=/="
    return f"{term_str(lhs)} {rel} {term_str(rhs)}"


def diseqs_str(ds: Iterable[tuple[Term, Term]]) -> str:
    ds = list(ds)
    if not ds:
        return "true"
    return " /\\ ".join(pair_str(u, v, False) for u, v in ds)


def clause_str(c: Clause) -> str:
    parts = [pair_str(u, v, True) for u, v in c.eqs] + [pair_str(u, v, False) for u, v in c.diseqs]
    return " /\\ ".join(parts) if parts else "true"


def formula_str(f: Formula) -> str:
    if isinstance(f, Atom):
        return pair_str(f.lhs, f.rhs, True)
    if isinstance(f, Not):
        if isinstance(f.body, Atom):
            return pair_str(f.body.lhs, f.body.rhs, False)
        return f"~ ({formula_str(f.body)})"
    if isinstance(f, And):
        return " /\\ ".join(f"({formula_str(p)})" for p in f.parts) if f.parts else "true"
    if isinstance(f, Or):
        return " \\/ ".join(f"({formula_str(p)})" for p in f.parts) if f.parts else "false"
    if isinstance(f, Implies):
        return f"({formula_str(f.lhs)}) => ({formula_str(f.rhs)})"
    if isinstance(f, Iff):
        return f"({formula_str(f.lhs)}) <=> ({formula_str(f.rhs)})"
    raise TypeError(f)


def subst_str(sigma: Mapping[Var, Term]) -> str:
    items = sorted(sigma.items(), key=lambda kv: term_key(kv[0]))
    return "{" + ", ".join(f"{x.name} |-> {term_str(t)}" for x, t in items) + "}"


def subst_json(sigma: Mapping[Var, Term]) -> dict[str, str]:
    return {f"{x.name}:{x.sort}": term_str(t) for x, t in
            sorted(sigma.items(), key=lambda kv: term_key(kv[0]))}


def theory_str(theory) -> str:
    """A ``.vsat`` rendering of ``theory`` that parses back to an equivalent theory."""
    sig = theory.signature
    lines = [f"theory {theory.name} is"]
    lines.append(f"  sorts {' '.join(sig.sorts.sorts)} .")
    for lo, hi in sig.sorts.edges:
        lines.append(f"  subsort {lo} < {hi} .")
    for op in sig.ops.values():
        attrs: list[str] = []
        if op.role == "constructor":
            attrs.append("ctor")
        elif op.role == "predicate":
            attrs.append("pred")
        if op.assoc:
            attrs.append("assoc")
        if op.comm:
            attrs.append("comm")
        if op.idem:
            attrs.append("idem")
        if op.identity is not None:
            attrs.append(f"id: {op.identity.op.name}")
        if op.is_infix or op.is_postfix:
            attrs.append(f"prec {op.prec}")
        if "subsort" in op.attrs:
            attrs.append(f"subsort: {op.attrs['subsort']}")
        if "sel" in op.attrs:
            attrs.append("sel: " + " ".join(op.attrs["sel"]))
        att = f" [{' '.join(attrs)}]" if attrs else ""
        args = " ".join(op.arg_sorts) + " " if op.arg_sorts else ""
        lines.append(f"  op {op.name} : {args}-> {op.result}{att} .")
    by_sort: dict[str, list[str]] = {}
    for name, v in theory.variables.items():
        by_sort.setdefault(v.sort, []).append(name)
    for sort, names in by_sort.items():
        lines.append(f"  vars {' '.join(names)} : {sort} .")
    for r in theory.rules:
        label = f"[{r.label}] : " if r.label else ""
        lines.append(f"  rl {label}{term_str(r.lhs, True)} => {term_str(r.rhs, True)} .")
    for p in theory.patterns:
        cond = ""
        if p.constraint:
            cond = " if " + " /\\ ".join(
                f"{term_str(u, True)} =/= {term_str(v, True)}" for u, v in p.constraint)
        lines.append(f"  npattern {term_str(p.atom, True)} =/= tt{cond} .")
    for s in sorted(theory.finite_annotations):
        lines.append(f"  finite sort {s} .")
    if theory.convergent:
        lines.append("  convergent .")
    lines.append("endth")
    return "\n".join(lines) + "\n"
