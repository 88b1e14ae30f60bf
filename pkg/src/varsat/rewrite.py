"""R,B-rewriting and innermost normalization modulo the structural axioms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .terms import (
    App, Op, Position, SortGraph, Term, Var, apply, mk, replace_at, subterm_at, term_vars,
)
from .unify import match, match_with_extension

R_DELTA, R_CTOR, R_PI = "R_delta", "R_ctor", "R_pi"


class StepLimitExceeded(RuntimeError):
    """Normalization exceeded its rewrite budget (likely a non-terminating theory)."""


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    label: str | None = None
    origin: str = R_DELTA

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise ValueError("rule left-hand side must not be a variable")
        if not term_vars(self.rhs) <= term_vars(self.lhs):
            raise ValueError("rule right-hand side has variables not in the left-hand side")

    @property
    def top(self) -> Op:
        return self.lhs.op


class Rewriter:
    """Innermost-leftmost rewriting with AC extension matching.

    Normal forms are memoised; terms are immutable so the cache stays valid
    for the lifetime of the rule set.
    """

    def __init__(self, rules: Sequence[Rule], sorts: SortGraph, step_limit: int = 100_000):
        self.rules = list(rules)
        self.sorts = sorts
        self.leq = sorts.leq
        self.step_limit = step_limit
        self.by_top: dict[Op, list[Rule]] = {}
        self.collapse_rules: list[Rule] = []
        for r in self.rules:
            self.by_top.setdefault(r.top, []).append(r)
            if r.top.theory == "ACU":
                self.collapse_rules.append(r)
        self._cache: dict[Term, Term] = {}
        self.rewrites = 0
        self._budget = 0

    def has_rules(self, op: Op) -> bool:
        return op in self.by_top

    # one step at the root of a term whose arguments are already irreducible
    def _root_step(self, t: App) -> tuple[Term, Rule] | None:
        rules = self.by_top.get(t.op, ())
        if self.collapse_rules:
            rules = list(rules) + [r for r in self.collapse_rules if r.top is not t.op]
        for rule in rules:
            lhs = rule.lhs
            op = lhs.op
            if op.is_ac:
                for sigma, rest in match_with_extension(op, lhs.args, t, self.leq):
                    rhs = apply(rule.rhs, sigma)
                    return (mk(op, [rhs, *rest]) if rest else rhs), rule
            else:
                for sigma in match(lhs, t, self.leq):
                    return apply(rule.rhs, sigma), rule
        return None

    def normalize(self, t: Term) -> Term:
        self._budget = 0
        return self._norm(t)

    def _norm(self, t: Term) -> Term:
        if isinstance(t, Var):
            return t
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        args = [self._norm(a) for a in t.args]
        u = t if all(a is b for a, b in zip(args, t.args)) else mk(t.op, args)
        hit = self._cache.get(u)
        if hit is not None:
            res = hit
        elif isinstance(u, Var):
            res = u
        else:
            step = self._root_step(u)
            if step is None:
                res = u
            else:
                self.rewrites += 1
                self._budget += 1
                if self._budget > self.step_limit:
                    raise StepLimitExceeded(f"more than {self.step_limit} rewrite steps")
                res = self._norm(step[0])
            self._cache[u] = res
        self._cache[t] = res
        return res

    def normalize_subst(self, sigma: Mapping[Var, Term]) -> dict[Var, Term]:
        return {x: self.normalize(t) for x, t in sigma.items()}

    def is_normalized(self, t: Term) -> bool:
        return self.normalize(t) is t

    def is_normalized_subst(self, sigma: Mapping[Var, Term]) -> bool:
        return all(self.is_normalized(t) for t in sigma.values())

    def rewrite_once(self, t: Term) -> tuple[Term, Rule, Position] | None:
        """One innermost-leftmost rewrite step, or ``None`` for a normal form."""
        for p in _innermost_positions(t):
            s = subterm_at(t, p)
            step = self._root_step(s)
            if step is not None:
                return replace_at(t, p, step[0]), step[1], p
        return None

    def rewrite_steps(self, t: Term, limit: int | None = None) -> Iterator[tuple[Term, Rule, Position]]:
        limit = self.step_limit if limit is None else limit
        for _ in range(limit):
            r = self.rewrite_once(t)
            if r is None:
                return
            yield r
            t = r[0]
        raise StepLimitExceeded(f"more than {limit} rewrite steps")


def _innermost_positions(t: Term, prefix: Position = ()) -> Iterator[Position]:
    if isinstance(t, Var):
        return
    for i, a in enumerate(t.args, 1):
        yield from _innermost_positions(a, prefix + (i,))
    yield prefix


def rules_by_origin(rules: Iterable[Rule], *origins: str) -> list[Rule]:
    return [r for r in rules if r.origin in origins]
