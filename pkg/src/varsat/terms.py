"""Sorts, operator declarations, terms, substitutions and positions.

Terms are hash-consed: two structurally equal terms built through
:func:`mk` / :class:`Var` are the same Python object, so ``is`` and ``==``
coincide and terms are cheap dictionary keys.  Terms are always kept in
canonical form modulo the structural axioms of their top symbol:

* arguments of ``comm`` symbols are sorted by :func:`term_key`;
* ``assoc comm`` symbols are flattened into a sorted argument list;
* the identity element of an ``assoc comm id:`` symbol never appears as an
  argument, and one- and zero-argument applications collapse.

With these invariants syntactic identity decides equality modulo the axioms.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

FREE, COMM, AC, ACU = "free", "C", "AC", "ACU"
DEFINED, CTOR, PRED = "defined", "constructor", "predicate"

PRED_SORT = "Pred"


class TermError(ValueError):
    pass


class InvalidPosition(TermError):
    pass


class NoLeastSort(TermError):
    pass


class SortGraph:
    """A finite poset of sorts with the reflexive-transitive closure cached."""

    def __init__(self, sorts: Iterable[str] = (), subsorts: Iterable[tuple[str, str]] = ()):
        self.sorts: list[str] = []
        self._below: dict[str, set[str]] = {}
        self._edges: list[tuple[str, str]] = []
        for s in sorts:
            self.add_sort(s)
        for lo, hi in subsorts:
            self.add_subsort(lo, hi)

    def add_sort(self, s: str) -> None:
        if s not in self._below:
            self.sorts.append(s)
            self._below[s] = {s}

    def add_subsort(self, lo: str, hi: str) -> None:
        for s in (lo, hi):
            if s not in self._below:
                raise TermError(f"unknown sort {s!r} in subsort declaration")
        self._edges.append((lo, hi))
        self._close()

    @property
    def edges(self) -> list[tuple[str, str]]:
        return list(self._edges)

    def _close(self) -> None:
        below = {s: {s} for s in self.sorts}
        changed = True
        for lo, hi in self._edges:
            below[hi].add(lo)
        while changed:
            changed = False
            for s in self.sorts:
                extra = set()
                for t in below[s]:
                    extra |= below[t]
                if not extra <= below[s]:
                    below[s] |= extra
                    changed = True
        self._below = below

    def leq(self, a: str, b: str) -> bool:
        return a == b or a in self._below.get(b, ())

    def subsorts_of(self, s: str) -> set[str]:
        return set(self._below[s])

    def cycles(self) -> list[tuple[str, str]]:
        return [(a, b) for a in self.sorts for b in self.sorts
                if a < b and self.leq(a, b) and self.leq(b, a)]

    def lower_bounds(self, a: str, b: str) -> list[str]:
        """Maximal common subsorts of ``a`` and ``b``."""
        common = self._below[a] & self._below[b]
        return sorted(s for s in common
                      if not any(t != s and self.leq(s, t) for t in common))

    def connected(self, a: str, b: str) -> bool:
        return self.component(a) == self.component(b)

    def component(self, s: str) -> frozenset[str]:
        seen = {s}
        todo = [s]
        while todo:
            x = todo.pop()
            for lo, hi in self._edges:
                for y in ((hi,) if lo == x else (lo,) if hi == x else ()):
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
        return frozenset(seen)


class Op:
    """An operator declaration ``name : arg_sorts -> result``."""

    __slots__ = ("name", "arg_sorts", "result", "assoc", "comm", "idem", "identity",
                 "role", "prec", "attrs", "__weakref__")

    def __init__(self, name: str, arg_sorts: Sequence[str], result: str, *,
                 assoc: bool = False, comm: bool = False, idem: bool = False,
                 role: str = DEFINED, prec: int | None = None,
                 attrs: Mapping[str, object] | None = None):
        self.name = name
        self.arg_sorts = tuple(arg_sorts)
        self.result = result
        self.assoc = assoc
        self.comm = comm
        self.idem = idem
        self.identity: Term | None = None
        self.role = role
        self.prec = prec if prec is not None else (41 if self.arity == 2 and self.is_infix else 0)
        self.attrs = dict(attrs or {})

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def theory(self) -> str:
        if self.assoc and self.comm:
            return ACU if self.identity is not None else AC
        if self.comm:
            return COMM
        return FREE

    @property
    def is_ac(self) -> bool:
        return self.assoc and self.comm

    @property
    def is_infix(self) -> bool:
        n = self.name
        return len(n) > 2 and n.startswith("_") and n.endswith("_") and n.count("_") == 2

    @property
    def is_postfix(self) -> bool:
        n = self.name
        return len(n) > 1 and n.startswith("_") and n.count("_") == 1

    @property
    def token(self) -> str:
        """Surface text of the operator without underscores."""
        return self.name.strip("_")

    def __repr__(self) -> str:
        return f"Op({self.name})"


def _var_key(name: str, sort: str) -> tuple:
    # numeric suffixes compare numerically so V9 < V10
    head = name.rstrip("0123456789")
    tail = name[len(head):]
    return (0, head, int(tail) if tail else -1, name, sort)


class Term:
    __slots__ = ()

    def __lt__(self, other: "Term") -> bool:
        return term_key(self) < term_key(other)


class Var(Term):
    __slots__ = ("name", "sort", "_key", "__weakref__")
    _table: "weakref.WeakValueDictionary[tuple[str, str], Var]" = weakref.WeakValueDictionary()

    def __new__(cls, name: str, sort: str):
        k = (name, sort)
        v = cls._table.get(k)
        if v is None:
            v = object.__new__(cls)
            v.name = name
            v.sort = sort
            v._key = _var_key(name, sort)
            cls._table[k] = v
        return v

    def __reduce__(self):
        return (Var, (self.name, self.sort))

    def __repr__(self) -> str:
        return f"{self.name}:{self.sort}"


class App(Term):
    __slots__ = ("op", "args", "_key", "_vars", "_size", "__weakref__")
    _table: "weakref.WeakValueDictionary[tuple, App]" = weakref.WeakValueDictionary()

    def __new__(cls, op: Op, args: tuple[Term, ...] = ()):
        k = (op, args)
        t = cls._table.get(k)
        if t is None:
            t = object.__new__(cls)
            t.op = op
            t.args = args
            t._key = None
            t._vars = None
            t._size = 1 + sum(size(a) for a in args)
            cls._table[k] = t
        return t

    def __repr__(self) -> str:
        if not self.args:
            return self.op.name
        return f"{self.op.name}({', '.join(map(repr, self.args))})"


def term_key(t: Term) -> tuple:
    """Total structural order on canonical terms (variables first)."""
    if isinstance(t, Var):
        return t._key
    k = t._key
    if k is None:
        k = (1, t.op.name, len(t.args), tuple(term_key(a) for a in t.args))
        t._key = k
    return k


def size(t: Term) -> int:
    return 1 if isinstance(t, Var) else t._size


def term_vars(t: Term) -> frozenset[Var]:
    if isinstance(t, Var):
        return frozenset((t,))
    vs = t._vars
    if vs is None:
        vs = frozenset().union(*(term_vars(a) for a in t.args)) if t.args else frozenset()
        t._vars = vs
    return vs


def vars_of(terms: Iterable[Term]) -> frozenset[Var]:
    out: set[Var] = set()
    for t in terms:
        out |= term_vars(t)
    return frozenset(out)


def is_ground(t: Term) -> bool:
    return not term_vars(t)


def is_identity(t: Term, op: Op) -> bool:
    return op.identity is not None and t is op.identity


def mk(op: Op, args: Sequence[Term] = ()) -> Term:
    """Build ``op(args)`` in canonical form."""
    if op.assoc and op.comm:
        flat: list[Term] = []
        ident = op.identity
        for a in args:
            if isinstance(a, App) and a.op is op:
                flat.extend(a.args)
            elif a is ident and ident is not None:
                continue
            else:
                flat.append(a)
        if not flat:
            if ident is None:
                raise TermError(f"empty argument list for {op.name}")
            return ident
        if len(flat) == 1:
            return flat[0]
        flat.sort(key=term_key)
        return App(op, tuple(flat))
    if op.comm:
        a, b = args
        if term_key(b) < term_key(a):
            a, b = b, a
        return App(op, (a, b))
    return App(op, tuple(args))


def ac_elements(t: Term, op: Op) -> list[Term]:
    """Elements of ``t`` viewed as a multiset under the AC(U) symbol ``op``."""
    if isinstance(t, App) and t.op is op:
        return list(t.args)
    if op.identity is not None and t is op.identity:
        return []
    return [t]


@dataclass
class Signature:
    """Sorts plus operators (one declaration per name; no ad-hoc overloading)."""

    sorts: SortGraph = field(default_factory=SortGraph)
    ops: dict[str, Op] = field(default_factory=dict)

    def add_op(self, op: Op) -> Op:
        if op.name in self.ops:
            raise TermError(f"operator {op.name!r} declared twice")
        for s in (*op.arg_sorts, op.result):
            if s not in self.sorts.sorts:
                raise TermError(f"unknown sort {s!r} in declaration of {op.name!r}")
        self.ops[op.name] = op
        return op

    def leq(self, a: str, b: str) -> bool:
        return self.sorts.leq(a, b)

    def least_sort(self, t: Term) -> str:
        return least_sort(t)

    def well_sorted(self, t: Term) -> bool:
        if isinstance(t, Var):
            return True
        op = t.op
        if op.is_ac:
            expected = [op.arg_sorts[0]] * len(t.args)
        else:
            expected = op.arg_sorts
            if len(t.args) != len(expected):
                return False
        return all(self.leq(least_sort(a), s) and self.well_sorted(a)
                   for a, s in zip(t.args, expected))

    def check_sorts(self, t: Term) -> None:
        if isinstance(t, Var):
            return
        op = t.op
        expected = [op.arg_sorts[0]] * len(t.args) if op.is_ac else op.arg_sorts
        if len(t.args) != len(expected):
            raise NoLeastSort(f"{op.name} expects {len(expected)} arguments, got {len(t.args)}")
        for a, s in zip(t.args, expected):
            self.check_sorts(a)
            ls = least_sort(a)
            if not self.leq(ls, s):
                raise NoLeastSort(f"argument {a!r} of sort {ls} is not of sort {s} in {op.name}")


def least_sort(t: Term) -> str:
    if isinstance(t, Var):
        return t.sort
    return t.op.result


# --- substitutions -----------------------------------------------------------

Subst = dict  # Var -> Term


def apply(t: Term, sigma: Mapping[Var, Term]) -> Term:
    """Homomorphic extension of ``sigma`` re-establishing canonical form."""
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t, t)
    vs = term_vars(t)
    if not vs or vs.isdisjoint(sigma.keys()):
        return t
    return mk(t.op, [apply(a, sigma) for a in t.args])


def compose(sigma: Mapping[Var, Term], rho: Mapping[Var, Term]) -> dict[Var, Term]:
    """``sigma`` then ``rho``: ``apply(t, compose(s, r)) == apply(apply(t, s), r)``."""
    out = {x: apply(t, rho) for x, t in sigma.items()}
    for x, t in rho.items():
        if x not in out:
            out[x] = t
    return {x: t for x, t in out.items() if t is not x}


def restrict(sigma: Mapping[Var, Term], keep: Iterable[Var]) -> dict[Var, Term]:
    keep = set(keep)
    return {x: t for x, t in sigma.items() if x in keep and t is not x}


def dom(sigma: Mapping[Var, Term]) -> set[Var]:
    return {x for x, t in sigma.items() if t is not x}


def ran(sigma: Mapping[Var, Term]) -> set[Var]:
    out: set[Var] = set()
    for x, t in sigma.items():
        if t is not x:
            out |= term_vars(t)
    return out


def is_idempotent(sigma: Mapping[Var, Term]) -> bool:
    return dom(sigma).isdisjoint(ran(sigma))


# --- positions ---------------------------------------------------------------

Position = tuple[int, ...]


def subterm_at(t: Term, p: Sequence[int]) -> Term:
    for i in p:
        if isinstance(t, Var) or not 1 <= i <= len(t.args):
            raise InvalidPosition(f"position {tuple(p)} is not valid")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Sequence[int], u: Term) -> Term:
    if not p:
        return u
    if isinstance(t, Var) or not 1 <= p[0] <= len(t.args):
        raise InvalidPosition(f"position {tuple(p)} is not valid")
    i = p[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], p[1:], u)
    return mk(t.op, args)


def positions(t: Term, prefix: Position = ()) -> Iterator[Position]:
    """Non-variable positions, outermost first (1-based child indices)."""
    if isinstance(t, Var):
        return
    yield prefix
    for i, a in enumerate(t.args, 1):
        yield from positions(a, prefix + (i,))


# --- fresh variables ---------------------------------------------------------

class FreshVars:
    """Per-query generator of fresh variable names ``V1, V2, ...``."""

    def __init__(self, reserved: Iterable[str] = (), prefix: str = "V"):
        self.prefix = prefix
        self.reserved = set(reserved)
        self._counter = itertools.count(1)

    def reserve(self, names: Iterable[str]) -> None:
        self.reserved.update(names)

    def reserve_vars(self, vs: Iterable[Var]) -> None:
        self.reserved.update(v.name for v in vs)

    def __call__(self, sort: str) -> Var:
        while True:
            name = f"{self.prefix}{next(self._counter)}"
            if name not in self.reserved:
                self.reserved.add(name)
                return Var(name, sort)


def rename_away(vs: Iterable[Var], fresh: FreshVars) -> dict[Var, Var]:
    """A sort-preserving bijective renaming of ``vs`` onto fresh variables."""
    return {v: fresh(v.sort) for v in sorted(vs, key=term_key)}


def rename_term_away(t: Term, avoid: Iterable[Var], fresh: FreshVars) -> tuple[Term, dict[Var, Var]]:
    fresh.reserve_vars(avoid)
    fresh.reserve_vars(term_vars(t))
    ren = rename_away(term_vars(t), fresh)
    return apply(t, ren), ren


def tuple_op(n: int) -> Op:
    """Free n-ary tuple symbol used to match several terms simultaneously."""
    op = _TUPLE_OPS.get(n)
    if op is None:
        op = Op(f"<tuple{n}>", ("<any>",) * n, "<any>", role=CTOR)
        _TUPLE_OPS[n] = op
    return op


_TUPLE_OPS: dict[int, Op] = {}
