"""Three-valued finiteness analysis of sorts over constructor normal forms."""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import CTOR, Term
from .theory import Theory, TheoryError, Diagnostic

FINITE = "finite"
INFINITE = "infinite"
UNKNOWN = "unknown"


class UnknownFiniteness(TheoryError):
    def __init__(self, sort: str):
        super().__init__([Diagnostic(
            "finite-sorts",
            f"cannot decide whether sort {sort} is finite; add 'finite sort {sort} .' if it is")])
        self.sort = sort


@dataclass
class SortInfo:
    status: str
    reps: list[Term] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)


@dataclass
class FiniteSortTable:
    sorts: dict[str, SortInfo]

    def status(self, sort: str) -> str:
        return self.sorts[sort].status

    def is_finite(self, sort: str) -> bool:
        return self.sorts[sort].status == FINITE

    def reps(self, sort: str) -> list[Term]:
        info = self.sorts[sort]
        if info.status == UNKNOWN:
            raise UnknownFiniteness(sort)
        return info.reps

    @property
    def finite_sorts(self) -> list[str]:
        return [s for s, i in self.sorts.items() if i.status == FINITE]

    def to_json(self) -> dict:
        from .printer import term_str
        return {s: {"status": i.status, **({"reps": [term_str(t) for t in i.reps]}
                                          if i.status == FINITE else {})}
                for s, i in self.sorts.items()}


def _reach(theory: Theory) -> dict[str, set[str]]:
    """Sorts whose terms can occur as constructor arguments below a term of each sort."""
    sorts = theory.sorts.sorts
    leq = theory.leq
    step: dict[str, set[str]] = {s: set() for s in sorts}
    for op in theory.ctor_ops:
        for s in sorts:
            if leq(op.result, s):
                for a in op.arg_sorts:
                    step[s] |= {b for b in sorts if leq(b, a)}
    closure: dict[str, set[str]] = {}
    for s in sorts:
        seen: set[str] = set()
        todo = list(step[s])
        while todo:
            x = todo.pop()
            if x not in seen:
                seen.add(x)
                todo.extend(step[x])
        closure[s] = seen
    return closure


def _free_infinite(theory: Theory) -> set[str]:
    """Sorts provably infinite through constructors that head no rule.

    Applying such a constructor to normal arguments yields a normal term, so
    iterating a cycle of them produces normal forms of strictly growing size.
    """
    from .rewrite import R_CTOR
    sorts = theory.sorts.sorts
    leq = theory.leq
    ruled = {r.top for r in theory.rules_of(R_CTOR)}
    edges: dict[str, set[str]] = {s: {t for t in sorts if t != s and leq(s, t)} for s in sorts}
    op_edges: set[tuple[str, str]] = set()
    for op in theory.ctor_ops:
        if op in ruled:
            continue
        for a in op.arg_sorts:
            for s in sorts:
                if leq(s, a):
                    op_edges.add((s, op.result))
                    edges[s].add(op.result)

    def reach(s: str) -> set[str]:
        seen, todo = {s}, [s]
        while todo:
            for t in edges[todo.pop()]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    reachable = {s: reach(s) for s in sorts}
    on_cycle = {s for s, r in op_edges if s in reachable[r]}
    return {t for c in on_cycle for t in reachable[c]}


def compute_finite_sorts(theory: Theory, depth: int = 4, budget: int = 20_000) -> FiniteSortTable:
    """Classify every sort as finite (with representatives), infinite or unknown.

    Constructor normal forms are enumerated by height.  A sort is finite once
    its own count and the counts of every sort below it in the constructor
    graph stop growing between two heights.  It is infinite when it lies
    above a cycle of rule-free constructors, or when it is built by
    constructors from an infinite sort and its count kept growing at every
    enumerated height.  Anything else is unknown unless annotated.
    """
    from .oracle import Enumerator

    enum = Enumerator(theory, (CTOR,), rewriter=theory.ctor_rewriter, level_cap=budget)
    sorts = list(theory.sorts.sorts)
    reach = _reach(theory)
    counts: dict[str, list[int]] = {s: [] for s in sorts}
    levels = 0
    for d in range(depth + 1):
        try:
            enum.upto(d)
        except OverflowError:
            break
        levels = d + 1
        for s in sorts:
            counts[s].append(sum(1 for t in enum.levels[d] if theory.leq(t.op.result, s))
                             + (counts[s][-1] if counts[s] else 0))
        if sum(len(lv) for lv in enum.levels) > budget:
            break

    proven = _free_infinite(theory)
    table: dict[str, SortInfo] = {}
    for s in sorts:
        deps = reach[s] | {s}
        stable_at = next((d for d in range(levels - 1)
                          if all(counts[x][d] == counts[x][d + 1] for x in deps)), None)
        c = counts[s]
        growing = len(c) >= 3 and all(a < b for a, b in zip(c[1:], c[2:]))
        if stable_at is not None:
            table[s] = SortInfo(FINITE, enum.of_sort(s, stable_at), c)
        elif s in proven:
            table[s] = SortInfo(INFINITE, [], c)
        elif s in theory.finite_annotations:
            table[s] = SortInfo(FINITE, enum.of_sort(s, levels - 1), c)
        elif growing and reach[s] & proven:
            table[s] = SortInfo(INFINITE, [], c)
        else:
            table[s] = SortInfo(UNKNOWN, [], c)
    return table_with_annotations(theory, FiniteSortTable(table))


def table_with_annotations(theory: Theory, table: FiniteSortTable) -> FiniteSortTable:
    for s in theory.finite_annotations:
        info = table.sorts.get(s)
        if info is not None and info.status == INFINITE:
            raise TheoryError([Diagnostic(
                "finite-sorts", f"sort {s} is annotated finite but has unboundedly many values")])
    return table


def finite_sorts_of(theory: Theory) -> FiniteSortTable:
    """Cached :func:`compute_finite_sorts` for ``theory``."""
    cached = theory.__dict__.get("_finite_table")
    if cached is None:
        cached = theory.__dict__["_finite_table"] = compute_finite_sorts(theory)
    return cached
