"""Quantifier-free formulas over equations, and their disjunctive normal form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .terms import Term, Var, term_key, vars_of


@dataclass(frozen=True)
class Atom:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Iff]

TRUE = And(())
FALSE = Or(())


def eq(u: Term, v: Term) -> Atom:
    return Atom(u, v)


def neq(u: Term, v: Term) -> Not:
    return Not(Atom(u, v))


@dataclass(frozen=True)
class Literal:
    lhs: Term
    rhs: Term
    positive: bool

    def negate(self) -> "Literal":
        return Literal(self.lhs, self.rhs, not self.positive)

    def key(self) -> tuple:
        a, b = sorted((term_key(self.lhs), term_key(self.rhs)))
        return (a, b)

    @property
    def trivial(self) -> bool:
        return self.lhs is self.rhs


@dataclass(frozen=True)
class Clause:
    """``/\\ G /\\ /\\ D``: equations ``eqs`` and disequations ``diseqs``."""

    eqs: tuple[tuple[Term, Term], ...] = ()
    diseqs: tuple[tuple[Term, Term], ...] = ()

    @property
    def variables(self) -> frozenset[Var]:
        return vars_of(t for pair in (*self.eqs, *self.diseqs) for t in pair)

    def literals(self) -> list[Literal]:
        return ([Literal(u, v, True) for u, v in self.eqs]
                + [Literal(u, v, False) for u, v in self.diseqs])


def atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.body)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from atoms(p)
    else:
        yield from atoms(f.lhs)
        yield from atoms(f.rhs)


def formula_vars(f: Formula) -> frozenset[Var]:
    return vars_of(t for a in atoms(f) for t in (a.lhs, a.rhs))


def negate(f: Formula) -> Formula:
    return Not(f)


def _nnf(f: Formula, positive: bool) -> list[list[Literal]]:
    """DNF of ``f`` (or of its negation) as a list of literal lists."""
    if isinstance(f, Atom):
        return [[Literal(f.lhs, f.rhs, positive)]]
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, Implies):
        return _nnf(Or((Not(f.lhs), f.rhs)), positive)
    if isinstance(f, Iff):
        both = And((f.lhs, f.rhs))
        neither = And((Not(f.lhs), Not(f.rhs)))
        if positive:
            return _nnf(Or((both, neither)), True)
        return _nnf(Or((And((f.lhs, Not(f.rhs))), And((Not(f.lhs), f.rhs)))), True)
    conj = isinstance(f, And) == positive
    parts = [_nnf(p, positive) for p in f.parts]
    if not conj:
        return [c for p in parts for c in p]
    out: list[list[Literal]] = [[]]
    for p in parts:
        out = [c + d for c in out for d in p]
    return out


def _clean(lits: Iterable[Literal]) -> Clause | None:
    seen: dict[tuple, bool] = {}
    eqs: list[tuple[Term, Term]] = []
    diseqs: list[tuple[Term, Term]] = []
    for lit in lits:
        if lit.trivial:
            if lit.positive:
                continue
            return None
        k = lit.key()
        if k in seen:
            if seen[k] != lit.positive:
                return None
            continue
        seen[k] = lit.positive
        (eqs if lit.positive else diseqs).append((lit.lhs, lit.rhs))
    return Clause(tuple(eqs), tuple(diseqs))


def to_dnf(f: Formula) -> list[Clause]:
    """Clauses whose disjunction is equivalent to ``f``.

    Trivially true literals ``t = t`` are dropped; clauses with ``t =/= t`` or
    with a literal and its negation are removed.
    """
    out: list[Clause] = []
    seen: set[Clause] = set()
    for lits in _nnf(f, True):
        c = _clean(lits)
        if c is not None and c not in seen:
            seen.add(c)
            out.append(c)
    return out
