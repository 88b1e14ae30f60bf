"""Variant-based E-unification through a conjunction encoding.

A system ``u1 = v1 /\\ ... /\\ un = vn`` is encoded as a single term over an
extended signature with inert literal and conjunction symbols, so its
variants are exactly the simultaneous variants of all the sides.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .terms import CTOR, App, FreshVars, Op, Term, Var, compose, restrict, term_key, vars_of
from .unify import minimize
from .variants import BOUND_EXCEEDED, VariantEngine, VariantResult

Equation = tuple[Term, Term]

_ANY = "<any>"
CONJ = Op("_/\\_", (_ANY, _ANY), _ANY, role=CTOR, prec=150)
EQ_LIT = Op("_=_", (_ANY, _ANY), _ANY, role=CTOR, prec=140)
NEQ_LIT = Op("_=/=_", (_ANY, _ANY), _ANY, role=CTOR, prec=140)
TRUE_CONJ = App(Op("true", (), _ANY, role=CTOR), ())


class BoundExceeded(RuntimeError):
    """Variant narrowing did not saturate within the configured bounds."""

    def __init__(self, message: str, partial: VariantResult | None = None):
        super().__init__(message)
        self.partial = partial


def encode(literals: Sequence[Equation], op: Op = EQ_LIT) -> Term:
    """Right-nested conjunction of literals built with ``op``."""
    if not literals:
        return TRUE_CONJ
    lits = [App(op, (u, v)) for u, v in literals]
    out = lits[-1]
    for lit in reversed(lits[:-1]):
        out = App(CONJ, (lit, out))
    return out


def encode_mixed(eqs: Sequence[Equation], diseqs: Sequence[Equation]) -> Term:
    lits = [App(EQ_LIT, p) for p in eqs] + [App(NEQ_LIT, p) for p in diseqs]
    if not lits:
        return TRUE_CONJ
    out = lits[-1]
    for lit in reversed(lits[:-1]):
        out = App(CONJ, (lit, out))
    return out


def decode(t: Term) -> list[tuple[bool, Term, Term]]:
    """``(positive, lhs, rhs)`` triples of an encoded conjunction."""
    out: list[tuple[bool, Term, Term]] = []
    while True:
        if t is TRUE_CONJ:
            return out
        if isinstance(t, App) and t.op is CONJ:
            lit, t = t.args
        else:
            lit, t = t, None
        if not isinstance(lit, App) or lit.op not in (EQ_LIT, NEQ_LIT):
            raise ValueError("not an encoded conjunction")
        out.append((lit.op is EQ_LIT, lit.args[0], lit.args[1]))
        if t is None:
            return out


def decode_pairs(t: Term) -> list[Equation]:
    return [(u, v) for _, u, v in decode(t)]


def var_unify(engine: VariantEngine, eqs: Sequence[Equation], fresh: FreshVars,
              away: Iterable[Var] = ()) -> list[dict]:
    """A complete set of E-unifiers of ``eqs`` away from ``away``.

    Raises :class:`BoundExceeded` when narrowing does not saturate.
    """
    eqs = list(eqs)
    if not eqs:
        return [{}]
    system_vars = vars_of(t for e in eqs for t in e)
    away_set = set(away) | set(system_vars)
    res = engine.narrow(encode(eqs), away=away_set, fresh=fresh)
    if res.status == BOUND_EXCEEDED:
        raise BoundExceeded("variant narrowing exceeded its bounds during unification", res)
    norm = engine.rewriter.normalize
    out: list[dict] = []
    for v in res.variants:
        pairs = decode_pairs(v.term)
        ran_theta = vars_of(v.subst.values())
        gammas = engine.unifier.unify(pairs, fresh, away=away_set | ran_theta | vars_of(
            t for p in pairs for t in p))
        engine.unifiers_computed += len(gammas)
        for g in gammas:
            sigma = restrict(compose(dict(v.subst), g), system_vars)
            out.append({x: norm(t) for x, t in sigma.items()})
    return minimize(_dedup(out), sorted(system_vars, key=term_key), engine.leq)


def _dedup(sigmas: list[dict]) -> list[dict]:
    seen = set()
    out = []
    for s in sigmas:
        k = tuple(sorted(((x, t) for x, t in s.items()), key=lambda p: term_key(p[0])))
        if k not in seen:
            seen.add(k)
            out.append(s)
    return out
