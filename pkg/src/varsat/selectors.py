"""Selector and sort-predicate transformation of a free constructor signature.

Each non-constant constructor ``c : A1 .. An -> B`` gets a subsort ``B_c < B``
that it now targets, selectors ``sel_i(c(x1..xn)) = xi`` and a sort predicate
``_:B_c`` with one positive rule and a negative pattern for every other
constructor of ``B``.
"""

from __future__ import annotations

from .rewrite import R_DELTA, R_PI, Rule
from .terms import CTOR, DEFINED, PRED, PRED_SORT, App, Op, Signature, SortGraph, Var, mk
from .theory import Diagnostic, NegativePattern, Theory, TheoryError


def selector_transform(theory: Theory, name: str | None = None) -> Theory:
    bad = [op.name for op in theory.signature.ops.values()
           if op.role != CTOR or op.assoc or op.comm or op.idem or op.identity is not None]
    if bad or theory.rules or theory.patterns:
        raise TheoryError([Diagnostic(
            "free-constructors",
            "selector transformation needs free constructors without rules"
            + (f" (offending: {', '.join(bad)})" if bad else ""))])

    old = theory.signature
    sorts = SortGraph(old.sorts.sorts, old.sorts.edges)
    sig = Signature(sorts)
    ctors = list(old.ops.values())
    taken = set(old.sorts.sorts) | set(old.ops)

    def fresh_name(base: str) -> str:
        n, k = base, 1
        while n in taken:
            k += 1
            n = f"{base}{k}"
        taken.add(n)
        return n

    sub_of: dict[str, str] = {}
    for c in ctors:
        if c.arity:
            sub_of[c.name] = c.attrs.get("subsort") or fresh_name(f"{c.result}{c.name.strip('_').capitalize()}")
            sorts.add_sort(sub_of[c.name])
            sorts.add_subsort(sub_of[c.name], c.result)
    if PRED_SORT not in sorts.sorts and sub_of:
        sorts.add_sort(PRED_SORT)

    new_ops: dict[str, Op] = {}
    for c in ctors:
        attrs = {k: v for k, v in c.attrs.items() if k in ("subsort", "sel")}
        target = sub_of.get(c.name, c.result)
        new_ops[c.name] = sig.add_op(Op(c.name, c.arg_sorts, target, role=CTOR,
                                        prec=c.prec if (c.is_infix or c.is_postfix) else None,
                                        attrs=attrs))
    tt_op = sig.ops.get("tt")
    if sub_of and tt_op is None:
        tt_op = sig.add_op(Op("tt", (), PRED_SORT, role=CTOR))
    tt = App(tt_op, ()) if tt_op else None

    rules: list[Rule] = []
    patterns: list[NegativePattern] = []
    variables = dict(theory.variables)
    counter = [0]

    def var(sort: str) -> Var:
        while True:
            counter[0] += 1
            nm = f"X{counter[0]}"
            if nm not in variables and nm not in taken:
                return Var(nm, sort)

    for c in ctors:
        if not c.arity:
            continue
        cn = new_ops[c.name]
        xs = [var(s) for s in c.arg_sorts]
        sels = c.attrs.get("sel") or []
        for i, a in enumerate(c.arg_sorts):
            sname = sels[i] if i < len(sels) else fresh_name(f"sel{i + 1}{c.name.strip('_')}")
            taken.add(sname)
            sel = sig.add_op(Op(sname, (sub_of[c.name],), a, role=DEFINED))
            rules.append(Rule(mk(sel, [mk(cn, xs)]), xs[i], None, R_DELTA))
        sub = sub_of[c.name]
        sp = sig.add_op(Op(f"_:{sub}", (c.result,), PRED_SORT, role=PRED, prec=15))
        rules.append(Rule(mk(sp, [var(sub)]), tt, None, R_PI))
        for d in ctors:
            if d is c or not old.sorts.leq(d.result, c.result):
                continue
            shape = mk(new_ops[d.name], [var(s) for s in d.arg_sorts])
            patterns.append(NegativePattern(mk(sp, [shape]), []))
    return Theory(name or f"{theory.name}-SEL", sig, rules, patterns, variables,
                  set(theory.finite_annotations), True, theory.step_limit, theory.caps)
