"""Bounded ground check that negative patterns describe exactly the normalized
predicate atoms different from ``tt``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .oracle import enumerate_ground_terms
from .printer import term_str
from .terms import CTOR, Term, apply, mk, term_key
from .theory import NegativePattern, Theory
from .unify import match

COVERAGE = "uncovered"
NOT_NORMALIZED = "instance-not-normalized"
CONSTRAINT_MISMATCH = "normalized-instance-violates-constraint"


@dataclass
class Counterexample:
    kind: str
    term: Term
    pattern: int | None = None

    def __str__(self) -> str:
        where = f" (pattern {self.pattern + 1})" if self.pattern is not None else ""
        return f"{self.kind}: {term_str(self.term)}{where}"


@dataclass
class PredicateReport:
    pred: str
    checked: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


@dataclass
class PatternReport:
    depth: int
    predicates: list[PredicateReport]

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.predicates)

    @property
    def counterexamples(self) -> list[Counterexample]:
        return [c for p in self.predicates for c in p.counterexamples]

    def to_json(self) -> dict:
        return {"depth": self.depth, "ok": self.ok,
                "predicates": [{"pred": p.pred, "ok": p.ok, "checked": p.checked,
                                "counterexamples": [str(c) for c in p.counterexamples]}
                               for p in self.predicates]}


def _holds(theory: Theory, pat: NegativePattern, rho: dict) -> bool:
    norm = theory.normalize
    return all(norm(apply(u, rho)) is not norm(apply(v, rho)) for u, v in pat.constraint)


def _domain(theory: Theory, sort: str, depth: int) -> list[Term]:
    return enumerate_ground_terms(theory, sort, depth, (CTOR,))


def check_pattern_equivalences(theory: Theory, depth: int = 3,
                               max_counterexamples: int = 5) -> PatternReport:
    """Ground-check both directions of the pattern characterization up to ``depth``.

    (a) For every pattern and ground normalized ``rho``: the instance is a
    normalized atom different from ``tt`` exactly when the constraint holds.
    (b) Every ground normalized atom ``p(t1..tn)`` other than ``tt`` with
    arguments of height at most ``depth`` is an instance of some pattern
    whose constraint holds.
    """
    rw = theory.rewriter
    tt = theory.tt
    reports = []
    for op in sorted(theory.pred_ops, key=lambda o: o.name):
        rep = PredicateReport(op.name)
        pats = [(i, p) for i, p in enumerate(theory.patterns) if p.pred is op]

        def add(c: Counterexample) -> bool:
            rep.counterexamples.append(c)
            return len(rep.counterexamples) >= max_counterexamples

        full = False
        for i, pat in pats:
            vs = sorted(pat.variables, key=term_key)
            for combo in itertools.product(*(_domain(theory, v.sort, depth) for v in vs)):
                rho = dict(zip(vs, combo))
                inst = apply(pat.atom, rho)
                rep.checked += 1
                normal = rw.is_normalized(inst) and inst is not tt
                if _holds(theory, pat, rho) and not normal:
                    full = add(Counterexample(NOT_NORMALIZED, inst, i))
                elif normal and not _holds(theory, pat, rho):
                    full = add(Counterexample(CONSTRAINT_MISMATCH, inst, i))
                if full:
                    break
            if full:
                break

        if not full:
            doms = [_domain(theory, s, depth) for s in op.arg_sorts]
            for args in itertools.product(*doms):
                atom = mk(op, list(args))
                rep.checked += 1
                if not rw.is_normalized(atom) or atom is tt:
                    continue
                if not any(_covers(theory, pat, atom) for _, pat in pats):
                    if add(Counterexample(COVERAGE, atom)):
                        break
        reports.append(rep)
    return PatternReport(depth, reports)


def _covers(theory: Theory, pat: NegativePattern, atom: Term) -> bool:
    return any(_holds(theory, pat, sigma) for sigma in match(pat.atom, atom, theory.leq))


def without_pattern(theory: Theory, index: int) -> Theory:
    pats = [p for i, p in enumerate(theory.patterns) if i != index]
    return theory.copy(patterns=pats)
