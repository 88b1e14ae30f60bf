"""Structural validation of a theory's constructor/defined/predicate split."""

from __future__ import annotations

from dataclasses import dataclass, field

from .rewrite import R_CTOR, R_PI
from .terms import CTOR, DEFINED, PRED, PRED_SORT, App, Term, least_sort, term_vars
from .theory import Diagnostic, Theory, TheoryError, inhabited_sorts


@dataclass
class ValidationReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_if_invalid(self) -> None:
        if not self.ok:
            raise TheoryError(self.errors)

    def to_json(self) -> dict:
        return {"ok": self.ok, "diagnostics": [d.to_json() for d in self.diagnostics]}


def _roles(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            out.add(u.op.role)
            stack.extend(u.args)
    return out


def _is_ctor_term(t: Term) -> bool:
    return _roles(t) <= {CTOR}


def validate_theory(theory: Theory, *, finite_table=None) -> ValidationReport:
    """Check the split conditions and rule well-formedness; never raises."""
    rep = ValidationReport()

    def err(cond: str, msg: str, line: int | None = None) -> None:
        rep.diagnostics.append(Diagnostic(cond, msg, "error", line))

    def warn(cond: str, msg: str) -> None:
        rep.diagnostics.append(Diagnostic(cond, msg, "warning"))

    sig = theory.signature
    leq = theory.leq

    if sig.sorts.cycles():
        err("sorts", "the subsort relation has a cycle")
    empty = set(sig.sorts.sorts) - inhabited_sorts(sig)
    for s in sorted(empty):
        err("inhabited", f"sort {s} has no ground terms")

    # predicates and the Pred sort
    preds = theory.pred_ops
    if preds or PRED_SORT in sig.sorts.sorts:
        tt = theory.tt
        if tt is None or tt.op.result != PRED_SORT or tt.op.role != CTOR:
            err("pred-sort", "predicates need a constructor constant 'tt : -> Pred'")
    for op in preds:
        if op.result != PRED_SORT:
            err("preds-only", f"predicate {op.name} must have result sort Pred, not {op.result}")
        if op.assoc or op.comm or op.idem or op.identity is not None:
            err("pred-axioms", f"predicate {op.name} must not carry equational attributes")
    for op in sig.ops.values():
        if any(leq(a, PRED_SORT) or leq(PRED_SORT, a) for a in op.arg_sorts):
            err("pred-nesting", f"operator {op.name} takes a Pred argument")

    # axioms: regular, linear, supported combinations
    for op in sig.ops.values():
        if op.idem:
            err("axioms-linear", f"idempotency of {op.name} is a non-linear axiom")
        if op.assoc and not op.comm:
            err("axioms-supported", f"associativity without commutativity ({op.name}) is not supported")
        if op.assoc and any(a != op.result for a in op.arg_sorts):
            err("preregular", f"associative {op.name} must have equal argument and result sorts")
        if op.comm and op.arity == 2 and op.arg_sorts[0] != op.arg_sorts[1]:
            err("preregular", f"commutative {op.name} must have equal argument sorts")
        if (op.assoc or op.comm) and op.arity != 2:
            err("axioms-supported", f"{op.name} must be binary to be assoc or comm")
        if op.identity is not None:
            if op.role != CTOR:
                err("delta-axioms",
                    f"identity of {op.name} relates a term to a variable; only constructors may have one")
            elif op.identity.op.role != CTOR:
                err("ctor-axioms", f"identity of {op.name} must be a constructor")
            elif not leq(op.identity.op.result, op.arg_sorts[0]):
                err("preregular", f"identity of {op.name} is not of its argument sort")
    if PRED_SORT in sig.sorts.sorts and any(
            op.result == PRED_SORT and op.role == DEFINED for op in sig.ops.values()):
        err("preds-only", "defined operators must not target Pred")

    # rules
    for r in theory.rules:
        lhs, rhs = r.lhs, r.rhs
        try:
            sig.check_sorts(lhs)
            sig.check_sorts(rhs)
        except Exception as e:
            err("rules", f"ill-sorted rule {r.label or ''}: {e}")
            continue
        if not leq(least_sort(rhs), least_sort(lhs)):
            err("rules", f"rule with top {lhs.op.name} is not sort-decreasing")
        if r.origin == R_PI:
            if rhs is not theory.tt:
                err("pi-rules", f"predicate rule for {lhs.op.name} must rewrite to tt")
            if not all(_roles(a) <= {CTOR} for a in lhs.args):
                err("pi-rules", f"predicate rule for {lhs.op.name} must have constructor arguments")
        elif r.origin == R_CTOR:
            if not (_is_ctor_term(lhs) and _is_ctor_term(rhs)):
                err("ctor-rules", f"constructor rule for {lhs.op.name} must only use constructors")
        if PRED in _roles(rhs) or (r.origin != R_PI and PRED in _roles(lhs)):
            err("preds-only", f"rule for {lhs.op.name} mentions a predicate outside a predicate rule")

    # negative patterns
    for p in theory.patterns:
        if not isinstance(p.atom, App) or p.atom.op.role != PRED:
            err("patterns", "negative pattern must be headed by a predicate", p.line)
            continue
        if not all(_is_ctor_term(a) for a in p.atom.args):
            err("patterns", f"pattern of {p.pred.name} must have constructor arguments", p.line)
        for u, v in p.constraint:
            if not (_is_ctor_term(u) and _is_ctor_term(v)):
                err("patterns", f"constraint of a {p.pred.name} pattern must use constructors", p.line)
            if not (term_vars(u) | term_vars(v)) <= p.variables:
                err("patterns", f"constraint of a {p.pred.name} pattern has extra variables", p.line)
    for op in preds:
        if not theory.patterns_for(op):
            warn("patterns", f"predicate {op.name} has no negative patterns; its negation is never satisfiable")

    if not theory.convergent:
        warn("convergent", "theory is not declared convergent; convergence is assumed")

    if finite_table is not None and PRED_SORT in sig.sorts.sorts:
        if finite_table.is_finite(PRED_SORT):
            warn("finite-pred", "sort Pred is finite; formulas must not use Pred-sorted variables")
    return rep


def check_formula_vars(theory: Theory, variables) -> None:
    bad = [v for v in variables if theory.leq(v.sort, PRED_SORT)]
    if bad:
        raise TheoryError([Diagnostic("formula", f"variable {bad[0].name} has sort Pred; "
                                                 "compare predicate atoms with tt instead")])


def check_literal(theory: Theory, u: Term, v: Term) -> None:
    """Predicate atoms may only be compared with ``tt``."""
    tt = theory.tt
    for a, b in ((u, v), (v, u)):
        if isinstance(a, App) and a.op.role == PRED and b is not tt:
            raise TheoryError([Diagnostic(
                "formula", f"predicate atom headed by {a.op.name} must be compared with tt")])
        if isinstance(a, App) and PRED in _roles(a) and a.op.role != PRED:
            raise TheoryError([Diagnostic("formula", "predicate atoms cannot occur inside terms")])
