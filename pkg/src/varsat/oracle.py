"""Brute-force ground semantics of the canonical term algebra, for testing.

Everything here is exhaustive over ground normal forms of bounded height and
never claims more than it checked: a missing witness is reported as
``NoWitnessUpToDepth``, never as unsatisfiability.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .formula import And, Atom, Formula, Iff, Implies, Not, Or, formula_vars
from .terms import CTOR, PRED, Term, Var, apply, mk, term_key, term_vars
from .theory import Theory

DEFAULT_CAP = 1_000_000


class Enumerator:
    """Normalized ground terms by constructor-tree height, deduplicated modulo B.

    ``roles`` selects the operators used to build terms: constructors only,
    or constructors plus predicates.
    """

    def __init__(self, theory: Theory, roles: Sequence[str] = (CTOR, PRED), *,
                 rewriter=None, level_cap: int = 200_000):
        self.theory = theory
        self.ops = [op for op in theory.signature.ops.values() if op.role in roles]
        self.normalize = (rewriter or theory.rewriter).normalize
        self.leq = theory.leq
        self.level_cap = level_cap
        # levels[d]: terms first reached at height d
        self.levels: list[list[Term]] = []
        self._seen: set[Term] = set()

    def _extend(self) -> None:
        d = len(self.levels)
        new: list[Term] = []
        if d == 0:
            for op in self.ops:
                if op.arity == 0:
                    self._add(self.normalize(mk(op, ())), new)
        else:
            older = [t for lvl in self.levels[:-1] for t in lvl]
            newest = self.levels[-1]
            every = older + newest
            for op in self.ops:
                if op.arity == 0:
                    continue
                pools = [[t for t in every if self.leq(t.op.result, s)] for s in op.arg_sorts]
                fresh_pools = [[t for t in newest if self.leq(t.op.result, s)]
                               for s in op.arg_sorts]
                # at least one argument must come from the newest level
                for k in range(op.arity):
                    if not fresh_pools[k]:
                        continue
                    choices = [pools[i] if i > k else
                               (fresh_pools[i] if i == k else
                                [t for t in pools[i] if t not in set(newest)])
                               for i in range(op.arity)]
                    for args in itertools.product(*choices):
                        self._add(self.normalize(mk(op, list(args))), new)
                        if len(new) > self.level_cap:
                            raise OverflowError(f"more than {self.level_cap} terms at height {d}")
        self.levels.append(new)

    def _add(self, t: Term, new: list[Term]) -> None:
        if t not in self._seen:
            self._seen.add(t)
            new.append(t)

    def upto(self, depth: int) -> list[Term]:
        while len(self.levels) <= depth:
            self._extend()
        return [t for lvl in self.levels[:depth + 1] for t in lvl]

    def of_sort(self, sort: str, depth: int) -> list[Term]:
        return [t for t in self.upto(depth) if self.leq(t.op.result, sort)]

    def count_by_level(self, sort: str, depth: int) -> list[int]:
        self.upto(depth)
        out, total = [], 0
        for lvl in self.levels[:depth + 1]:
            total += sum(1 for t in lvl if self.leq(t.op.result, sort))
            out.append(total)
        return out


def enumerate_ground_terms(theory: Theory, sort: str, depth: int,
                           roles: Sequence[str] = (CTOR, PRED)) -> list[Term]:
    """Ground normal forms of ``sort`` built from terms of height at most ``depth``."""
    return _enumerator(theory, tuple(roles)).of_sort(sort, depth)


def _enumerator(theory: Theory, roles: tuple[str, ...]) -> Enumerator:
    cache = theory.__dict__.setdefault("_enumerators", {})
    e = cache.get(roles)
    if e is None:
        e = cache[roles] = Enumerator(theory, roles)
    return e


# --- formula evaluation -------------------------------------------------------

def evaluate(theory: Theory, f: Formula, rho: Mapping[Var, Term]) -> bool:
    norm = theory.normalize
    if isinstance(f, Atom):
        return norm(apply(f.lhs, rho)) is norm(apply(f.rhs, rho))
    if isinstance(f, Not):
        return not evaluate(theory, f.body, rho)
    if isinstance(f, And):
        return all(evaluate(theory, p, rho) for p in f.parts)
    if isinstance(f, Or):
        return any(evaluate(theory, p, rho) for p in f.parts)
    if isinstance(f, Implies):
        return (not evaluate(theory, f.lhs, rho)) or evaluate(theory, f.rhs, rho)
    if isinstance(f, Iff):
        return evaluate(theory, f.lhs, rho) == evaluate(theory, f.rhs, rho)
    raise TypeError(f)


@dataclass
class OracleResult:
    status: str  # Witness | NoWitnessUpToDepth | Overflow
    witness: dict[Var, Term] | None = None
    checked: int = 0
    space: int = 0
    depth: int = 0

    @property
    def found(self) -> bool:
        return self.status == "Witness"


def _domains(theory: Theory, vs: Sequence[Var], depth: int) -> list[list[Term]]:
    return [enumerate_ground_terms(theory, v.sort, depth, (CTOR,)) for v in vs]


def brute_force_sat(theory: Theory, f: Formula, depth: int, cap: int = DEFAULT_CAP) -> OracleResult:
    """Search all assignments of ground constructor normal forms up to ``depth``."""
    vs = sorted(formula_vars(f), key=term_key)
    doms = _domains(theory, vs, depth)
    space = 1
    for d in doms:
        space *= len(d)
    if space > cap:
        return OracleResult("Overflow", None, 0, space, depth)
    checked = 0
    for combo in itertools.product(*doms):
        rho = dict(zip(vs, combo))
        checked += 1
        if evaluate(theory, f, rho):
            return OracleResult("Witness", rho, checked, space, depth)
    return OracleResult("NoWitnessUpToDepth", None, checked, space, depth)


def brute_force_variants(theory: Theory, t: Term, depth: int,
                         cap: int = DEFAULT_CAP) -> list[tuple[Term, dict[Var, Term]]]:
    """All ``(normalize(t rho), rho)`` for ground normalized ``rho`` up to ``depth``."""
    vs = sorted(term_vars(t), key=term_key)
    doms = _domains(theory, vs, depth)
    space = 1
    for d in doms:
        space *= len(d)
    if space > cap:
        raise OverflowError(f"{space} ground substitutions exceed the cap of {cap}")
    out = []
    for combo in itertools.product(*doms):
        rho = dict(zip(vs, combo))
        out.append((theory.normalize(apply(t, rho)), rho))
    return out


def ground_instances_satisfying(theory: Theory, diseqs: Sequence[tuple[Term, Term]], depth: int,
                                cap: int = DEFAULT_CAP) -> dict[Var, Term] | None:
    """A ground assignment making every disequality true, if one exists up to ``depth``."""
    vs = sorted({v for u, w in diseqs for v in term_vars(u) | term_vars(w)}, key=term_key)
    doms = _domains(theory, vs, depth)
    norm = theory.normalize
    n = 0
    for combo in itertools.product(*doms):
        n += 1
        if n > cap:
            return None
        rho = dict(zip(vs, combo))
        if all(norm(apply(u, rho)) is not norm(apply(w, rho)) for u, w in diseqs):
            return rho
    return None


def verify_witness(theory: Theory, f: Formula, subst: Mapping[Var, Term],
                   diseqs: Sequence[tuple[Term, Term]], depth: int = 3) -> dict[Var, Term] | None:
    """Ground the symbolic witness and check it satisfies ``f``.

    ``subst`` maps the formula's variables to terms over the witness
    variables; a ground assignment of those variables that makes ``diseqs``
    true is searched for, then the formula is evaluated directly.
    """
    rest = ground_instances_satisfying(theory, diseqs, depth)
    if rest is None:
        return None
    ground = {}
    for x in formula_vars(f):
        t = apply(subst.get(x, x), rest)
        if term_vars(t):
            # unconstrained leftovers: any constructor value will do
            extra = {}
            for v in term_vars(t):
                dom = enumerate_ground_terms(theory, v.sort, depth, (CTOR,))
                if not dom:
                    return None
                extra[v] = dom[0]
            t = apply(t, extra)
        ground[x] = theory.normalize(t)
    return ground if evaluate(theory, f, ground) else None
