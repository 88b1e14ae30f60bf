"""Theories with a constructor/defined/predicate split, and their validation.

A :class:`Theory` is a rewrite theory ``(Sigma, B, R)`` whose operators are
partitioned into defined symbols, constructors and predicates.  The axioms
``B`` are carried as operator attributes; the rules are split by the role of
their top symbol.  Predicates may carry negative constrained patterns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .rewrite import R_CTOR, R_DELTA, R_PI, Rewriter, Rule
from .terms import (
    CTOR, DEFINED, PRED, App, FreshVars, Op, Signature, Term, Var, least_sort,
    term_vars, vars_of,
)
from .unify import Unifier, UnifyCaps

Literal = tuple[Term, Term]


class TheoryError(ValueError):
    def __init__(self, diagnostics: Sequence["Diagnostic"] | str):
        if isinstance(diagnostics, str):
            diagnostics = [Diagnostic("syntax", diagnostics)]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    condition: str
    message: str
    severity: str = "error"
    line: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line else ""
        return f"{where}[{self.condition}] {self.message}"

    def to_json(self) -> dict:
        return {"condition": self.condition, "message": self.message,
                "severity": self.severity, "line": self.line}


@dataclass
class NegativePattern:
    """``/\\ w_l =/= w'_l  =>  p(v1..vn) =/= tt``."""

    atom: Term
    constraint: list[Literal] = field(default_factory=list)
    line: int | None = None

    @property
    def pred(self) -> Op:
        return self.atom.op

    @property
    def variables(self) -> frozenset[Var]:
        return term_vars(self.atom)


@dataclass
class Theory:
    name: str
    signature: Signature
    rules: list[Rule] = field(default_factory=list)
    patterns: list[NegativePattern] = field(default_factory=list)
    variables: dict[str, Var] = field(default_factory=dict)
    finite_annotations: set[str] = field(default_factory=set)
    convergent: bool = False
    step_limit: int = 100_000
    caps: UnifyCaps = field(default_factory=UnifyCaps)

    # --- signature views ----------------------------------------------------
    @property
    def sorts(self):
        return self.signature.sorts

    def op(self, name: str) -> Op:
        return self.signature.ops[name]

    def ops_with_role(self, role: str) -> list[Op]:
        return [op for op in self.signature.ops.values() if op.role == role]

    @property
    def defined_ops(self) -> list[Op]:
        return self.ops_with_role(DEFINED)

    @property
    def ctor_ops(self) -> list[Op]:
        return self.ops_with_role(CTOR)

    @property
    def pred_ops(self) -> list[Op]:
        return self.ops_with_role(PRED)

    @cached_property
    def tt(self) -> Term | None:
        op = self.signature.ops.get("tt")
        return App(op, ()) if op is not None and not op.arg_sorts else None

    def leq(self, a: str, b: str) -> bool:
        return self.signature.sorts.leq(a, b)

    # --- rule partitions and engines ---------------------------------------
    def rules_of(self, *origins: str) -> list[Rule]:
        return [r for r in self.rules if r.origin in origins]

    @cached_property
    def rewriter(self) -> Rewriter:
        return Rewriter(self.rules, self.sorts, self.step_limit)

    @cached_property
    def ctor_rewriter(self) -> Rewriter:
        return Rewriter(self.rules_of(R_CTOR), self.sorts, self.step_limit)

    @cached_property
    def unifier(self) -> Unifier:
        return Unifier(self.sorts, self.caps)

    def normalize(self, t: Term) -> Term:
        return self.rewriter.normalize(t)

    def fresh(self, *terms: Term) -> FreshVars:
        fv = FreshVars()
        fv.reserve(self.variables)
        fv.reserve_vars(vars_of(terms))
        return fv

    def patterns_for(self, op: Op) -> list[NegativePattern]:
        return [p for p in self.patterns if p.pred is op]

    def symbols_of(self, t: Term) -> set[Op]:
        out: set[Op] = set()
        stack = [t]
        while stack:
            u = stack.pop()
            if isinstance(u, App):
                out.add(u.op)
                stack.extend(u.args)
        return out

    def is_ctor_term(self, t: Term, *, allow_preds: bool = True) -> bool:
        roles = {CTOR, PRED} if allow_preds else {CTOR}
        return all(op.role in roles for op in self.symbols_of(t))

    def rule_origin(self, op: Op) -> str:
        return {DEFINED: R_DELTA, CTOR: R_CTOR, PRED: R_PI}[op.role]

    def copy(self, **changes) -> "Theory":
        """Shallow copy without cached engines (for pattern-removal experiments)."""
        fields_ = dict(name=self.name, signature=self.signature, rules=list(self.rules),
                       patterns=list(self.patterns), variables=dict(self.variables),
                       finite_annotations=set(self.finite_annotations),
                       convergent=self.convergent, step_limit=self.step_limit, caps=self.caps)
        fields_.update(changes)
        return Theory(**fields_)


def make_rule(theory_sig: Signature, lhs: Term, rhs: Term, label: str | None = None) -> Rule:
    origin = {DEFINED: R_DELTA, CTOR: R_CTOR, PRED: R_PI}[lhs.op.role] if isinstance(lhs, App) else R_DELTA
    return Rule(lhs, rhs, label, origin)


def inhabited_sorts(sig: Signature) -> set[str]:
    """Sorts with at least one ground term (fixpoint over operator declarations)."""
    have: set[str] = set()
    changed = True
    while changed:
        changed = False
        for op in sig.ops.values():
            if op.result in have and all(
                    any(sig.leq(h, a) for h in have) for a in op.arg_sorts):
                continue
            if all(any(sig.leq(h, a) for h in have) for a in op.arg_sorts):
                for s in sig.sorts.sorts:
                    if sig.leq(op.result, s) and s not in have:
                        have.add(s)
                        changed = True
    return have


def literal_vars(lits: Iterable[Literal]) -> frozenset[Var]:
    return vars_of(t for lit in lits for t in lit)


def sort_of(t: Term) -> str:
    return least_sort(t)
