"""Equality, matching and unification modulo free, C, AC and ACU symbols.

Because terms are kept canonical (see :mod:`varsat.terms`), equality modulo
the axioms is identity of canonical forms.  Matching enumerates argument
pairings for C symbols and multiset splits for AC(U) symbols.  Unification
follows Stickel's method: flattened AC(U) equations are abstracted into a
linear Diophantine equation over multiplicities, and unifiers are generated
from subsets of its minimal solution basis.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .diophantine import DiophantineLimit, solve_ac_equation
from .terms import (
    App, FreshVars, Op, SortGraph, Term, Var, ac_elements, apply, least_sort, mk, term_key,
    term_vars, tuple_op, vars_of,
)

Equation = tuple[Term, Term]
Leq = Callable[[str, str], bool]


class UnificationLimit(RuntimeError):
    """A resource cap of the unification procedure was exceeded."""


@dataclass
class UnifyCaps:
    max_basis: int = 2000
    max_subsets: int = 100_000
    max_steps: int = 200_000


def b_equal(t: Term, u: Term) -> bool:
    return t is u


# --- matching ----------------------------------------------------------------


def match(pattern: Term, subject: Term, leq: Leq, sigma: dict | None = None) -> Iterator[dict]:
    """All ``s`` extending ``sigma`` with ``apply(pattern, s) == subject`` modulo B.

    Variables of ``subject`` are treated as constants.
    """
    yield from _match(pattern, subject, leq, dict(sigma or {}))


def _match(p: Term, s: Term, leq: Leq, sigma: dict) -> Iterator[dict]:
    if isinstance(p, Var):
        bound = sigma.get(p)
        if bound is not None:
            if bound is s:
                yield sigma
        elif leq(least_sort(s), p.sort):
            out = dict(sigma)
            out[p] = s
            yield out
        return
    if not term_vars(p):
        if p is s:
            yield sigma
        return
    op = p.op
    if op.is_ac:
        elems = ac_elements(s, op)
        if op.identity is None and len(elems) < len(p.args):
            return
        for sig, _rest in _match_ac(op, p.args, elems, leq, sigma, extension=False):
            yield sig
        return
    if not isinstance(s, App) or s.op is not op:
        return
    if op.comm:
        a, b = p.args
        c, d = s.args
        yield from _match_list((a, b), (c, d), leq, sigma)
        if c is not d and a is not b:
            yield from _match_list((a, b), (d, c), leq, sigma)
        return
    yield from _match_list(p.args, s.args, leq, sigma)


def _arg_rank(p: Term) -> int:
    if isinstance(p, Var):
        return 0
    if not p.op.is_ac:
        return 1
    return 2


def _match_list(ps: Sequence[Term], ss: Sequence[Term], leq: Leq, sigma: dict) -> Iterator[dict]:
    if len(ps) != len(ss):
        return
    pairs = list(zip(ps, ss))
    # ground and identical pairs need no search
    todo = []
    for p, s in pairs:
        if not term_vars(p):
            if p is not s:
                return
        else:
            todo.append((p, s))
    yield from _match_pairs(todo, leq, sigma)


def _pair_cost(p: Term, sigma: dict) -> tuple[int, int]:
    if isinstance(p, Var):
        return (0, 0)
    free = sum(1 for v in term_vars(p) if v not in sigma)
    return (_arg_rank(p) if free else 0, free)


def _match_pairs(todo: list, leq: Leq, sigma: dict) -> Iterator[dict]:
    if not todo:
        yield sigma
        return
    # most constrained pair first: bound variables prune AC splits early
    best = min(range(len(todo)), key=lambda i: _pair_cost(todo[i][0], sigma))
    p, s = todo[best]
    rest = todo[:best] + todo[best + 1:]
    for sig2 in _match(p, s, leq, sigma):
        yield from _match_pairs(rest, leq, sig2)


def match_with_extension(op: Op, pargs: Sequence[Term], subject: Term, leq: Leq,
                         sigma: dict | None = None) -> Iterator[tuple[dict, list[Term]]]:
    """Match ``op(pargs)`` against a sub-multiset of ``subject``; yields the remainder too."""
    yield from _match_ac(op, pargs, ac_elements(subject, op), leq, dict(sigma or {}),
                         extension=True)


def _take(counts: Counter, items: Iterable[Term], times: int = 1) -> Counter | None:
    out = Counter(counts)
    for e in items:
        out[e] -= times
        if out[e] < 0:
            return None
        if out[e] == 0:
            del out[e]
    return out


def _match_ac(op: Op, pargs: Sequence[Term], elems: list[Term], leq: Leq, sigma: dict,
              extension: bool) -> Iterator[tuple[dict, list[Term]]]:
    counts = Counter(elems)
    nonvar = [p for p in pargs if not isinstance(p, Var)]
    var_mult = Counter(p for p in pargs if isinstance(p, Var))

    def rest_list(c: Counter) -> list[Term]:
        return sorted(c.elements(), key=term_key)

    def match_nonvar(i: int, c: Counter, sig: dict) -> Iterator[tuple[dict, Counter]]:
        if i == len(nonvar):
            yield sig, c
            return
        p = nonvar[i]
        for e in list(c):
            for sig2 in _match(p, e, leq, sig):
                c2 = Counter(c)
                c2[e] -= 1
                if not c2[e]:
                    del c2[e]
                yield from match_nonvar(i + 1, c2, sig2)

    for sig, c in match_nonvar(0, counts, sigma):
        free: list[tuple[Var, int]] = []
        ok = True
        for x, m in var_mult.items():
            val = sig.get(x)
            if val is None:
                free.append((x, m))
                continue
            c = _take(c, ac_elements(val, op), m)
            if c is None:
                ok = False
                break
        if not ok:
            continue
        for sig2, rem in _distribute(op, free, c, leq, sig, extension):
            yield sig2, rest_list(rem)


def _submultisets(c: Counter, keys: list[Term], mult: int) -> Iterator[Counter]:
    ranges = [range(c[k] // mult + 1) for k in keys]
    for combo in itertools.product(*ranges):
        yield Counter({k: n for k, n in zip(keys, combo) if n})


def _distribute(op: Op, free: list[tuple[Var, int]], c: Counter, leq: Leq, sigma: dict,
                extension: bool) -> Iterator[tuple[dict, Counter]]:
    ident = op.identity
    if not free:
        if extension or not c:
            yield sigma, c
        return
    (x, m), others = free[0], free[1:]
    keys = sorted(c, key=term_key)
    can_be_ident = ident is not None and leq(least_sort(ident), x.sort)
    can_be_sum = leq(op.result, x.sort)
    total = sum(c.values())
    # without an identity every later variable needs at least one element
    reserve = 0 if ident is not None else sum(k for _, k in others)
    if not others and not extension:
        # last variable takes everything left
        if any(n % m for n in c.values()):
            return
        part = Counter({k: n // m for k, n in c.items()})
        choices: Iterable[Counter] = [part]
    elif not can_be_sum:
        # a single element (or the identity)
        singles = [Counter({k: 1}) for k in keys if c[k] >= m]
        choices = ([Counter()] if can_be_ident else []) + singles
    else:
        choices = _submultisets(c, keys, m)
    for part in choices:
        n = sum(part.values())
        if not extension and total - n * m < reserve:
            continue
        if n == 0:
            if not can_be_ident:
                continue
            val = ident
        elif n == 1:
            (val,) = part.elements()
            if not leq(least_sort(val), x.sort):
                continue
        else:
            if not can_be_sum:
                continue
            val = mk(op, list(part.elements()))
        rem = Counter(c)
        for k, k_n in part.items():
            rem[k] -= k_n * m
            if not rem[k]:
                del rem[k]
        sig = dict(sigma)
        sig[x] = val
        yield from _distribute(op, others, rem, leq, sig, extension)


def match_all(patterns: Sequence[Term], subjects: Sequence[Term], leq: Leq) -> Iterator[dict]:
    """Simultaneous matching of a list of patterns against a list of subjects."""
    n = len(patterns)
    if n != len(subjects):
        return iter(())
    op = tuple_op(n)
    return match(App(op, tuple(patterns)), App(op, tuple(subjects)), leq)


def subsumes(general: Sequence[Term], specific: Sequence[Term], leq: Leq) -> bool:
    """True iff some ``rho`` maps the ``general`` tuple onto the ``specific`` one."""
    return next(iter(match_all(general, specific, leq)), None) is not None


def is_renaming(sigma: dict) -> bool:
    vals = list(sigma.values())
    return all(isinstance(v, Var) for v in vals) and len(set(vals)) == len(vals)


def alpha_equivalent(ts: Sequence[Term], us: Sequence[Term], leq: Leq) -> bool:
    for sig in match_all(ts, us, leq):
        if is_renaming(sig):
            return True
    return False


# --- unification -------------------------------------------------------------

class _State:
    __slots__ = ("eqs", "sigma")

    def __init__(self, eqs: list[Equation], sigma: dict):
        self.eqs = eqs
        self.sigma = sigma


def _bind(state: _State, x: Var, t: Term, guard: "_Guard | None" = None) -> _State | None:
    b = {x: t}
    sigma = {y: apply(v, b) for y, v in state.sigma.items()}
    sigma[x] = t
    if guard is not None and not guard.ok(sigma, x):
        return None
    eqs = [(apply(l, b), apply(r, b)) for l, r in state.eqs]
    return _State(eqs, sigma)


class _Guard:
    """Rejects partial solutions binding a protected variable to a reducible term.

    Reducibility is stable under instantiation, so pruning early is sound
    when only normalized unifiers are wanted.
    """

    def __init__(self, protect: frozenset[Var], reducible: Callable[[Term], bool]):
        self.protect = protect
        self.reducible = reducible

    def ok(self, sigma: dict, x: Var) -> bool:
        for y in self.protect:
            v = sigma.get(y)
            if v is not None and (y is x or x in term_vars(v)) and self.reducible(v):
                return False
        return True

    def protected_vars(self, sigma: dict) -> set[Var]:
        out = set(self.protect)
        for y in self.protect:
            v = sigma.get(y)
            if v is not None:
                out |= term_vars(v)
        return out


class Unifier:
    """B-unification for a fixed sort poset."""

    def __init__(self, sorts: SortGraph, caps: UnifyCaps | None = None):
        self.sorts = sorts
        self.leq = sorts.leq
        self.caps = caps or UnifyCaps()
        self._glb_cache: dict[tuple[str, str], list[str]] = {}

    def unify(self, eqs: Sequence[Equation], fresh: FreshVars,
              away: Iterable[Var] = (), *, protect: Iterable[Var] = (),
              reducible: Callable[[Term], bool] | None = None,
              minimal: bool = True) -> list[dict]:
        """Complete, minimal set of idempotent B-unifiers away from ``away``.

        Variables of the system left unconstrained are omitted (identity).
        With ``reducible``, unifiers mapping a variable of ``protect`` to a
        reducible term are not generated.
        """
        eqs = list(eqs)
        system_vars = vars_of(t for e in eqs for t in e)
        avoid = set(away) | set(system_vars)
        fresh.reserve_vars(avoid)
        guard = _Guard(frozenset(protect), reducible) if reducible is not None and protect else None
        raw = []
        for sigma in self._solve(eqs, fresh, guard):
            raw.append(self._finish(sigma, system_vars, avoid, fresh))
        if not minimal:
            return raw
        return minimize(raw, sorted(system_vars, key=term_key), self.leq)

    def unifiable(self, eqs: Sequence[Equation], fresh: FreshVars) -> bool:
        return next(iter(self._solve(list(eqs), fresh)), None) is not None

    def _finish(self, sigma: dict, system_vars: frozenset, avoid: set, fresh: FreshVars) -> dict:
        full = {x: sigma.get(x, x) for x in system_vars}
        clash: set[Var] = set()
        for x, t in full.items():
            if t is not x:
                clash |= term_vars(t) & avoid
        ren = {v: fresh(v.sort) for v in sorted(clash, key=term_key)}
        out = {x: apply(t, ren) for x, t in full.items()}
        return {x: t for x, t in out.items() if t is not x}

    def _solve(self, eqs: list[Equation], fresh: FreshVars,
               guard: _Guard | None = None) -> Iterator[dict]:
        stack = [_State(eqs, {})]
        steps = 0
        self._guard = guard
        while stack:
            st = stack.pop()
            steps += 1
            if steps > self.caps.max_steps:
                raise UnificationLimit(f"unification exceeded {self.caps.max_steps} steps")
            if not st.eqs:
                yield st.sigma
                continue
            (l, r), rest = st.eqs[0], st.eqs[1:]
            succ = [s for s in self._step(l, r, _State(rest, st.sigma), fresh) if s is not None]
            stack.extend(reversed(succ))

    def _step(self, l: Term, r: Term, st: _State, fresh: FreshVars) -> Iterator[_State]:
        if l is r:
            yield st
            return
        if isinstance(r, Var) and not isinstance(l, Var):
            l, r = r, l
        if isinstance(l, Var):
            yield from self._solve_var(l, r, st, fresh)
            return
        lop, rop = l.op, r.op
        if lop is rop:
            if lop.is_ac:
                yield from self._solve_ac(lop, ac_elements(l, lop), ac_elements(r, lop), st, fresh)
            elif lop.comm:
                a, b = l.args
                c, d = r.args
                yield _State([(a, c), (b, d)] + st.eqs, st.sigma)
                if c is not d and a is not b:
                    yield _State([(a, d), (b, c)] + st.eqs, st.sigma)
            else:
                yield _State(list(zip(l.args, r.args)) + st.eqs, st.sigma)
            return
        # different top symbols: only an identity collapse can help
        for op, mine, other in ((lop, l, r), (rop, r, l)):
            if op.theory == "ACU":
                yield from self._solve_ac(op, ac_elements(mine, op), ac_elements(other, op),
                                          st, fresh)
                return

    def _solve_var(self, x: Var, t: Term, st: _State, fresh: FreshVars) -> Iterator[_State]:
        leq = self.leq
        if isinstance(t, Var):
            if leq(t.sort, x.sort):
                yield _bind(st, x, t, self._guard)
            elif leq(x.sort, t.sort):
                yield _bind(st, t, x, self._guard)
            else:
                for s in self._glbs(x.sort, t.sort):
                    z = fresh(s)
                    st2 = _bind(st, x, z, self._guard)
                    if st2 is not None:
                        yield _bind(st2, t, z, self._guard)
            return
        occurs = x in term_vars(t)
        if not occurs and leq(least_sort(t), x.sort):
            yield _bind(st, x, t, self._guard)
            return
        op = t.op
        if op.theory == "ACU":
            yield from self._solve_ac(op, [x], ac_elements(t, op), st, fresh)

    def _glbs(self, a: str, b: str) -> list[str]:
        key = (a, b)
        lower = self._glb_cache.get(key)
        if lower is None:
            lower = self._glb_cache[key] = self.sorts.lower_bounds(a, b)
        return lower

    def _solve_ac(self, op: Op, left: list[Term], right: list[Term], st: _State,
                  fresh: FreshVars) -> Iterator[_State]:
        lc, rc = Counter(left), Counter(right)
        common = lc & rc
        lc -= common
        rc -= common
        ident = op.identity
        leq = self.leq
        if not lc and not rc:
            yield st
            return
        if not lc or not rc:
            if ident is None:
                return
            side = lc or rc
            eqs = []
            for e in side:
                if not isinstance(e, Var):
                    return
                eqs.append((e, ident))
            yield _State(eqs + st.eqs, st.sigma)
            return
        # single unrestricted variable opposite anything: direct binding
        for one, other in ((lc, rc), (rc, lc)):
            if len(one) == 1:
                (x, m), = one.items()
                if (m == 1 and isinstance(x, Var) and leq(op.result, x.sort)
                        and not any(x in term_vars(e) for e in other)):
                    val = mk(op, list(other.elements()))
                    yield _bind(st, x, val, self._guard)
                    return
        lkeys = sorted(lc, key=term_key)
        rkeys = sorted(rc, key=term_key)
        unknowns = lkeys + rkeys
        try:
            basis = solve_ac_equation([lc[k] for k in lkeys], [rc[k] for k in rkeys],
                                      max_basis=self.caps.max_basis)
        except DiophantineLimit as e:
            raise UnificationLimit(str(e)) from e
        restricted = [not isinstance(u, Var) or not leq(op.result, u.sort) for u in unknowns]
        n = len(unknowns)
        guard = self._guard
        if guard is not None:
            basis = self._prune_basis(op, basis, unknowns, guard.protected_vars(st.sigma), guard)
        for subset in self._ac_subsets(basis, restricted, ident is not None):
            zs = [fresh(op.arg_sorts[0]) for _ in subset]
            eqs_var: list[Equation] = []
            eqs_alien: list[Equation] = []
            for i in range(n):
                parts = []
                for vec, z in zip(subset, zs):
                    parts.extend([z] * vec[i])
                if not parts:
                    val = ident
                else:
                    val = mk(op, parts) if len(parts) > 1 else parts[0]
                u = unknowns[i]
                (eqs_var if isinstance(u, Var) else eqs_alien).append((u, val))
            yield _State(eqs_var + eqs_alien + st.eqs, st.sigma)

    def _prune_basis(self, op: Op, basis: list[tuple[int, ...]], unknowns: list[Term],
                     protected: set[Var], guard: _Guard) -> list[tuple[int, ...]]:
        # a protected column receiving z twice holds an instance of op(z, z)
        z = Var("#z", op.arg_sorts[0])
        bad: dict[int, bool] = {}
        out = []
        for v in basis:
            ok = True
            for i, k in enumerate(v):
                if k >= 2 and unknowns[i] in protected:
                    if k not in bad:
                        bad[k] = guard.reducible(mk(op, [z] * k))
                    if bad[k]:
                        ok = False
                        break
            if ok:
                out.append(v)
        return out

    def _ac_subsets(self, basis: list[tuple[int, ...]], restricted: list[bool],
                    identity: bool) -> Iterator[list[tuple[int, ...]]]:
        n = len(restricted)
        touching = [v for v in basis if any(v[i] and restricted[i] for i in range(n))]
        if identity:
            always = [v for v in basis if v not in touching]
            pool = touching
        else:
            always = []
            pool = basis
        count = 0
        cap = self.caps.max_subsets

        def go(i: int, chosen: list, sums: list[int]) -> Iterator[list]:
            nonlocal count
            if i == len(pool):
                if all(sums[k] == 1 for k in range(n) if restricted[k]) and (
                        identity or all(s >= 1 for s in sums)):
                    count += 1
                    if count > cap:
                        raise UnificationLimit(f"AC unification exceeds {cap} basis subsets")
                    yield always + chosen
                return
            # feasibility: every column still short must be reachable by later vectors
            v = pool[i]
            new = [s + x for s, x in zip(sums, v)]
            if all(not restricted[k] or new[k] <= 1 for k in range(n)):
                chosen.append(v)
                yield from go(i + 1, chosen, new)
                chosen.pop()
            yield from go(i + 1, chosen, sums)

        base = [0] * n
        for v in always:
            base = [s + x for s, x in zip(base, v)]
        yield from go(0, [], base)


def minimize(unifiers: list[dict], over: Sequence[Var], leq: Leq) -> list[dict]:
    """Drop unifiers that are instances of another one (on the variables ``over``)."""
    images = [tuple(s.get(x, x) for x in over) for s in unifiers]
    keep: list[int] = []
    for i, img in enumerate(images):
        if any(subsumes(images[j], img, leq) for j in keep):
            continue
        keep = [j for j in keep if not subsumes(img, images[j], leq)]
        keep.append(i)
    return [unifiers[i] for i in sorted(keep)]
