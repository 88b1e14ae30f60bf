"""Folding variant narrowing, constructor variants and FVP checking.

A variant of ``t`` is a pair ``(u, theta)`` with ``u`` the normal form of
``t theta`` and ``theta`` normalized.  Narrowing starts at ``(t!, id)`` and
unifies rule left-hand sides at non-variable positions; a new node is folded
away when an already generated node is more general.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .rewrite import Rewriter, Rule
from .terms import (
    App, FreshVars, Op, Term, Var, apply, compose, mk, positions, replace_at, restrict,
    subterm_at, term_key, term_vars, tuple_op,
)
from .unify import Unifier, match

COMPLETE = "Complete"
BOUND_EXCEEDED = "BoundExceeded"


@dataclass(frozen=True)
class Variant:
    term: Term
    subst: Mapping[Var, Term]

    def image(self, over: Sequence[Var]) -> tuple[Term, ...]:
        return (self.term, *(self.subst.get(x, x) for x in over))


@dataclass
class VariantResult:
    source: Term
    status: str
    variants: list[Variant]
    nodes: int = 0
    depth: int = 0

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE

    def __len__(self) -> int:
        return len(self.variants)


@dataclass
class Bounds:
    max_depth: int = 10
    max_nodes: int = 10_000


def _graph(v: Variant, over: Sequence[Var]) -> Term:
    return App(tuple_op(len(over) + 1), v.image(over))


def subsumes(a: Variant, b: Variant, source_vars: Iterable[Var], leq) -> bool:
    """``a`` is more general than ``b`` as variants of a term over ``source_vars``."""
    over = sorted(source_vars, key=term_key)
    return next(iter(match(_graph(a, over), _graph(b, over), leq)), None) is not None


def minimize_variants(vs: list[Variant], source_vars: Iterable[Var], leq) -> list[Variant]:
    over = sorted(source_vars, key=term_key)
    graphs = [_graph(v, over) for v in vs]

    def sub(i: int, j: int) -> bool:
        return next(iter(match(graphs[i], graphs[j], leq)), None) is not None

    keep: list[int] = []
    for i in range(len(vs)):
        if any(sub(j, i) for j in keep):
            continue
        keep = [j for j in keep if not sub(i, j)]
        keep.append(i)
    return [vs[i] for i in sorted(keep)]


class VariantEngine:
    """Folding variant narrowing for a fixed rule set."""

    def __init__(self, rules: Sequence[Rule], rewriter: Rewriter, unifier: Unifier,
                 bounds: Bounds | None = None):
        self.rules = list(rules)
        self.rewriter = rewriter
        self.unifier = unifier
        self.leq = unifier.leq
        self.bounds = bounds or Bounds()
        self.unifiers_computed = 0

    def _reducible(self, t: Term) -> bool:
        return not self.rewriter.is_normalized(t)

    def _rules_for(self, s: App) -> list[Rule]:
        return [r for r in self.rules if r.top is s.op or r.top.theory == "ACU"]

    def _children(self, node: Variant, source_vars: Sequence[Var], away: set[Var],
                  fresh: FreshVars) -> list[Variant]:
        u = node.term
        out: list[Variant] = []
        norm = self.rewriter.normalize
        for p in positions(u):
            s = subterm_at(u, p)
            for rule in self._rules_for(s):
                avoid = away | term_vars(u) | set(node.subst) | _ran(node.subst)
                fresh.reserve_vars(avoid)
                ren = {v: fresh(v.sort) for v in sorted(term_vars(rule.lhs), key=term_key)}
                lhs = apply(rule.lhs, ren)
                rhs = apply(rule.rhs, ren)
                op = lhs.op
                shapes: list[tuple[Term, Term]] = []
                if op.is_ac:
                    if op.identity is None or _absorbs_extension(lhs, self.leq):
                        shapes.append((lhs, rhs))
                    if not _absorbs_extension(lhs, self.leq):
                        ext = fresh(op.arg_sorts[0])
                        shapes.append((mk(op, [*lhs.args, ext]), mk(op, [rhs, ext])))
                else:
                    shapes.append((lhs, rhs))
                for l, r in shapes:
                    unifiers = self.unifier.unify([(s, l)], fresh, away=avoid,
                                                  protect=term_vars(u), reducible=self._reducible)
                    self.unifiers_computed += len(unifiers)
                    for sigma in unifiers:
                        theta = restrict(compose(dict(node.subst), sigma), source_vars)
                        if not self.rewriter.is_normalized_subst(theta):
                            continue
                        t2 = norm(apply(replace_at(u, p, r), sigma))
                        out.append(Variant(t2, theta))
        return out

    def narrow(self, t: Term, away: Iterable[Var] = (), fresh: FreshVars | None = None,
               stop: Callable[[Variant], bool] | None = None) -> VariantResult:
        source_vars = sorted(term_vars(t), key=term_key)
        away_set = set(away) | set(source_vars)
        if fresh is None:
            fresh = FreshVars()
        fresh.reserve_vars(away_set)
        root = Variant(self.rewriter.normalize(t), {})
        nodes = [root]
        graphs = [_graph(root, source_vars)]
        frontier = [root]
        depth = 0
        if stop is not None and stop(root):
            return VariantResult(t, COMPLETE, [root], 1, 0)
        while frontier:
            if depth >= self.bounds.max_depth:
                return self._partial(t, nodes, source_vars, depth)
            depth += 1
            nxt: list[Variant] = []
            for node in frontier:
                for child in self._children(node, source_vars, away_set, fresh):
                    g = _graph(child, source_vars)
                    if any(next(iter(match(h, g, self.leq)), None) is not None for h in graphs):
                        continue
                    nodes.append(child)
                    graphs.append(g)
                    nxt.append(child)
                    if stop is not None and stop(child):
                        return VariantResult(t, COMPLETE, [child], len(nodes), depth)
                    if len(nodes) > self.bounds.max_nodes:
                        return self._partial(t, nodes, source_vars, depth)
            frontier = nxt
        return VariantResult(t, COMPLETE, self._final(nodes, source_vars), len(nodes), depth)

    def _partial(self, t: Term, nodes: list[Variant], source_vars, depth: int) -> VariantResult:
        return VariantResult(t, BOUND_EXCEEDED, self._final(nodes, source_vars), len(nodes), depth)

    def _final(self, nodes: list[Variant], source_vars: Sequence[Var]) -> list[Variant]:
        return [tidy(v, source_vars) for v in minimize_variants(nodes, source_vars, self.leq)]


def tidy(v: Variant, source_vars: Sequence[Var]) -> Variant:
    """Undo bindings ``x |-> v`` where ``v`` is a private fresh variable of ``x``'s sort."""
    theta = dict(v.subst)
    src = set(source_vars)
    ren: dict[Var, Var] = {}
    for x in source_vars:
        y = theta.get(x)
        if not isinstance(y, Var) or y.sort != x.sort or y in src or y in ren:
            continue
        if any(y in term_vars(t) for z, t in theta.items() if z is not x):
            continue
        ren[y] = x
        del theta[x]
    if not ren:
        return v
    return Variant(apply(v.term, ren), {x: apply(t, ren) for x, t in theta.items()})


def _absorbs_extension(lhs: App, leq) -> bool:
    """An AC left-hand side with a linear variable argument able to hold any
    sub-multiset already covers its own extension."""
    op = lhs.op
    args = lhs.args
    return any(isinstance(a, Var) and args.count(a) == 1 and leq(op.result, a.sort)
               for a in args)


def _ran(sigma: Mapping[Var, Term]) -> set[Var]:
    out: set[Var] = set()
    for t in sigma.values():
        out |= term_vars(t)
    return out


def generic_term(op: Op, fresh: FreshVars) -> Term:
    """``f(x1, ..., xn)`` with fresh variables of the argument sorts."""
    return mk(op, [fresh(s) for s in op.arg_sorts])


@dataclass
class SymbolReport:
    op: str
    status: str
    count: int
    variants: list[Variant] = field(default_factory=list)
    nodes: int = 0
    source: Term | None = None


@dataclass
class FvpReport:
    symbols: list[SymbolReport]

    @property
    def fvp(self) -> bool:
        return all(s.status == COMPLETE for s in self.symbols)

    @property
    def complexity(self) -> int | None:
        return sum(s.count for s in self.symbols) if self.fvp else None

    def symbol(self, name: str) -> SymbolReport:
        return next(s for s in self.symbols if s.op == name)


def fvp_check(engine: VariantEngine, ops: Iterable[Op]) -> FvpReport:
    """Narrow ``f(x1..xn)`` for every symbol that heads some rule."""
    with_rules = {r.top for r in engine.rules}
    reports = []
    for op in ops:
        if op not in with_rules:
            continue
        fresh = FreshVars(prefix="X")
        t = generic_term(op, fresh)
        res = engine.narrow(t, fresh=fresh)
        reports.append(SymbolReport(op.name, res.status, len(res.variants), res.variants,
                                    res.nodes, t))
    return FvpReport(reports)
