"""Satisfiability and inductive validity of quantifier-free formulas.

Each DNF clause ``/\\ G /\\ /\\ D`` goes through three steps:

1. unify: replace the clause by ``(/\\ D) alpha`` for every variant unifier
   ``alpha`` of ``G``;
2. eliminate: remove predicate disequalities ``p(t) =/= tt`` one at a time
   using constructor variants of ``p(t)`` and the negative patterns of ``p``;
3. constructors: take constructor variants of the remaining conjunction,
   instantiate finite-sort variables by representatives, and look for a
   B-consistent instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

from .finite import UNKNOWN, FiniteSortTable, UnknownFiniteness, finite_sorts_of
from .formula import Clause, Formula, Not, formula_vars, to_dnf
from .printer import clause_str, diseqs_str, pair_str, raw_instance_str, subst_json, subst_str, term_str
from .terms import PRED, App, FreshVars, Term, Var, apply, compose, restrict, term_key, vars_of
from .theory import Theory
from .validate import check_formula_vars, check_literal
from .variants import Bounds, Variant, VariantEngine
from .varunify import BoundExceeded, decode, encode_mixed, var_unify

SAT = "Sat"
UNSAT = "Unsat"
VALID = "Valid"
INVALID = "Invalid"

Pair = tuple[Term, Term]


@dataclass
class TraceStep:
    step: str
    branch: str
    input: str
    output: list[str] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)
    # structured payload for programmatic inspection (not serialized)
    terms: list[list[Pair]] = field(default_factory=list, repr=False, compare=False)

    def to_json(self) -> dict:
        return {"step": self.step, "branch": self.branch, "input": self.input,
                "output": list(self.output), "info": self.info}

    def __str__(self) -> str:
        head = f"[{self.branch}] {self.step}: {self.input}"
        extra = "".join(f"\n    {k}: {v}" for k, v in self.info.items() if v not in ([], {}, None))
        outs = "".join(f"\n    => {o}" for o in self.output) or "\n    => (none)"
        return head + extra + outs


@dataclass
class Witness:
    """A satisfiable constructor conjunction and how the formula maps into it."""

    diseqs: list[Pair]
    assignment: dict[Var, Term]
    subst: dict[Var, Term]
    ground: dict[Var, Term] | None = None

    def to_json(self) -> dict:
        out = {"constraints": diseqs_str(self.diseqs),
               "finite_assignment": subst_json(self.assignment),
               "substitution": subst_json(self.subst)}
        if self.ground is not None:
            out["ground"] = subst_json(self.ground)
        return out

    def __str__(self) -> str:
        s = diseqs_str(self.diseqs)
        if self.subst:
            s = f"{subst_str(self.subst)} with {s}"
        if self.ground is not None:
            s += f"; e.g. {subst_str(self.ground)}"
        return s


@dataclass
class Stats:
    nodes: int = 0
    rewrites: int = 0
    unifiers: int = 0

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "rewrites": self.rewrites, "unifiers": self.unifiers}


@dataclass
class Verdict:
    status: str
    formula: Formula
    witness: Witness | None = None
    trace: list[TraceStep] = field(default_factory=list)
    stats: Stats = field(default_factory=Stats)

    @property
    def sat(self) -> bool:
        return self.status == SAT

    def steps(self, name: str) -> list[TraceStep]:
        return [t for t in self.trace if t.step == name]

    def to_json(self) -> dict:
        out: dict[str, Any] = {"verdict": self.status}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        out["trace"] = [t.to_json() for t in self.trace]
        out["stats"] = self.stats.to_json()
        return out


def b_consistent(theory: Theory, diseqs: Sequence[Pair]) -> bool:
    """No disequality has B-equal sides after normalization."""
    norm = theory.normalize
    return all(norm(u) is not norm(v) for u, v in diseqs)


def _obviously_unsat(diseqs: Sequence[Pair]) -> Pair | None:
    return next(((u, v) for u, v in diseqs if u is v), None)


def _dedup(diseqs: Sequence[Pair]) -> list[Pair]:
    seen, out = set(), []
    for u, v in diseqs:
        k = frozenset((u, v))
        if k not in seen:
            seen.add(k)
            out.append((u, v))
    return out


class Decider:
    """The three-step procedure over a fixed (assumed FVP) theory."""

    def __init__(self, theory: Theory, bounds: Bounds | None = None,
                 table: FiniteSortTable | None = None, trace_cap: int = 10_000):
        self.theory = theory
        self.engine = VariantEngine(theory.rules, theory.rewriter, theory.unifier, bounds)
        self._table = table
        self.trace_cap = trace_cap
        self._trace: list[TraceStep] = []
        self._nodes = 0

    @property
    def table(self) -> FiniteSortTable:
        if self._table is None:
            self._table = finite_sorts_of(self.theory)
        return self._table

    # --- public API --------------------------------------------------------
    def check_formula(self, f: Formula) -> None:
        from .formula import atoms
        check_formula_vars(self.theory, formula_vars(f))
        for a in atoms(f):
            check_literal(self.theory, a.lhs, a.rhs)

    def satisfiable(self, f: Formula) -> Verdict:
        self.check_formula(f)
        self._trace = []
        self._nodes = 0
        rw0 = self.theory.rewriter.rewrites + self.theory.ctor_rewriter.rewrites
        un0 = self.engine.unifiers_computed
        clauses = to_dnf(f)
        self._log(TraceStep("dnf", "0", "formula", [clause_str(c) for c in clauses],
                            terms=[list(c.diseqs) for c in clauses]))
        self._formula_vars = formula_vars(f)
        witness = None
        for i, c in enumerate(clauses, 1):
            witness = self._clause(c, str(i))
            if witness is not None:
                break
        status = SAT if witness is not None else UNSAT
        self._log(TraceStep("verdict", "0", status))
        stats = Stats(self._nodes,
                      self.theory.rewriter.rewrites + self.theory.ctor_rewriter.rewrites - rw0,
                      self.engine.unifiers_computed - un0)
        return Verdict(status, f, witness, list(self._trace), stats)

    def valid(self, f: Formula) -> Verdict:
        v = self.satisfiable(Not(f))
        v.status = VALID if v.status == UNSAT else INVALID
        v.formula = f
        if v.trace and v.trace[-1].step == "verdict":
            v.trace[-1].input = v.status
        return v

    def b_consistent(self, diseqs: Sequence[Pair]) -> bool:
        return b_consistent(self.theory, diseqs)

    # --- steps -------------------------------------------------------------
    def _log(self, step: TraceStep) -> None:
        if len(self._trace) < self.trace_cap:
            self._trace.append(step)

    def _fresh(self, *extra: Term) -> FreshVars:
        fv = self.theory.fresh(*extra)
        fv.reserve_vars(self._formula_vars)
        return fv

    def _clause(self, c: Clause, bid: str) -> Witness | None:
        norm = self.theory.normalize
        fresh = self._fresh()
        for u, v in c.eqs:
            if not vars_of((u, v)) and norm(u) is not norm(v):
                self._log(TraceStep("unify", bid, clause_str(c), [],
                                    {"discarded": f"ground equation {pair_str(u, v, True)} is false"}))
                return None
        try:
            unifiers = var_unify(self.engine, c.eqs, fresh, away=c.variables | self._formula_vars)
        except BoundExceeded as e:
            self._nodes += e.partial.nodes if e.partial else 0
            raise
        branches: list[tuple[list[Pair], dict]] = []
        outputs: list[str] = []
        discarded: list[str] = []
        for alpha in unifiers:
            ds = _dedup([(norm(apply(u, alpha)), norm(apply(v, alpha))) for u, v in c.diseqs])
            bad = _obviously_unsat(ds)
            if bad is not None:
                discarded.append(f"{subst_str(alpha)}: {pair_str(*bad, False)}")
                continue
            branches.append((ds, restrict(alpha, self._formula_vars)))
            outputs.append(diseqs_str(ds))
        info: dict[str, Any] = {"equations": len(c.eqs), "unifiers": [subst_str(a) for a in unifiers]}
        if discarded:
            info["discarded"] = discarded
        self._log(TraceStep("unify", bid, clause_str(c), outputs, info,
                            terms=[ds for ds, _ in branches]))
        for k, (ds, subst) in enumerate(branches, 1):
            sub_id = f"{bid}.{k}" if len(branches) > 1 else bid
            for conj, sigma, leaf in self._eliminate(ds, subst, sub_id, fresh):
                w = self._constructors(conj, sigma, leaf, fresh)
                if w is not None:
                    return w
        return None

    def _pred_literal(self, ds: Sequence[Pair]) -> tuple[int, Term] | None:
        tt = self.theory.tt
        for i, (u, v) in enumerate(ds):
            for a, b in ((u, v), (v, u)):
                if b is tt and isinstance(a, App) and a.op.role == PRED:
                    return i, a
        return None

    def _eliminate(self, ds: list[Pair], subst: dict, bid: str,
                   fresh: FreshVars) -> Iterator[tuple[list[Pair], dict, str]]:
        found = self._pred_literal(ds)
        if found is None:
            yield ds, subst, bid
            return
        k, atom = found
        th = self.theory
        norm = th.normalize
        W = vars_of(t for p in ds for t in p)
        res = self.engine.narrow(atom, away=W | self._formula_vars, fresh=fresh)
        self._nodes += res.nodes
        if not res.complete:
            raise BoundExceeded(f"variant narrowing of {term_str(atom)} exceeded its bounds", res)
        tt = th.tt
        variants = [v for v in res.variants
                    if v.term is not tt and th.is_ctor_term(v.term)]
        rest = ds[:k], ds[k + 1:]
        outputs: list[str] = []
        raws: list[str] = []
        discarded: list[str] = []
        children: list[tuple[list[Pair], dict]] = []
        patterns = th.patterns_for(atom.op)
        for var in variants:
            theta = dict(var.subst)
            ran_theta = vars_of(theta.values())
            for j, pat in enumerate(patterns):
                fresh.reserve_vars(W | ran_theta | vars_of([var.term]))
                ren = {x: fresh(x.sort) for x in sorted(pat.variables, key=term_key)}
                patom = apply(pat.atom, ren)
                constraint = [(apply(u, ren), apply(v, ren)) for u, v in pat.constraint]
                alphas = th.unifier.unify([(var.term, patom)], fresh,
                                          away=W | ran_theta | vars_of([var.term]))
                self.engine.unifiers_computed += len(alphas)
                for alpha in alphas:
                    sigma = compose(theta, alpha)
                    lits = [*rest[0], *constraint, *rest[1]]
                    raw = " /\\ ".join(f"{raw_instance_str(u, sigma)} =/= {raw_instance_str(v, sigma)}"
                                       for u, v in lits) or "true"
                    raws.append(raw)
                    new = _dedup([(norm(apply(u, sigma)), norm(apply(v, sigma))) for u, v in lits])
                    bad = _obviously_unsat(new)
                    if bad is not None:
                        discarded.append(f"{raw}  ~>  {pair_str(*bad, False)}")
                        continue
                    outputs.append(diseqs_str(new))
                    children.append((new, restrict(compose(subst, sigma), self._formula_vars)))
        self._log(TraceStep(
            "eliminate", bid, diseqs_str(ds), outputs,
            {"literal": f"{term_str(atom)} =/= tt",
             "variants": [f"{term_str(v.term)} with {subst_str(v.subst)}" for v in variants],
             "patterns": len(patterns), "instances": raws, "discarded": discarded},
            terms=[c for c, _ in children]))
        for n, (conj, sigma) in enumerate(children, 1):
            yield from self._eliminate(conj, sigma, f"{bid}.{n}", fresh)

    def _constructors(self, ds: list[Pair], subst: dict, bid: str,
                      fresh: FreshVars) -> Witness | None:
        th = self.theory
        if not ds:
            w = Witness([], {}, dict(subst))
            self._log(TraceStep("constructors", bid, "true", ["true"], {"consistent": True}))
            return w
        W = vars_of(t for p in ds for t in p)
        for x in W:
            if self.table.status(x.sort) == UNKNOWN:
                raise UnknownFiniteness(x.sort)
        tried = [0]
        hit: list[Witness] = []

        def stop(v: Variant) -> bool:
            if not th.is_ctor_term(v.term, allow_preds=False):
                return False
            tried[0] += 1
            lits = [(u, w) for _, u, w in decode(v.term)]
            w = self._finite_instance(lits, v.subst, subst)
            if w is not None:
                hit.append(w)
                return True
            return False

        res = self.engine.narrow(encode_mixed([], ds), away=W | self._formula_vars,
                                 fresh=fresh, stop=stop)
        self._nodes += res.nodes
        if hit:
            w = hit[0]
            self._log(TraceStep("constructors", bid, diseqs_str(ds), [diseqs_str(w.diseqs)],
                                {"constructor_variants_tried": tried[0], "consistent": True,
                                 "finite_assignment": subst_str(w.assignment)},
                                terms=[w.diseqs]))
            return w
        if not res.complete:
            raise BoundExceeded("variant narrowing of a constraint exceeded its bounds", res)
        self._log(TraceStep("constructors", bid, diseqs_str(ds), [],
                            {"constructor_variants_tried": tried[0], "consistent": False}))
        return None

    def _finite_instance(self, lits: list[Pair], gamma, subst: dict) -> Witness | None:
        th = self.theory
        crw = th.ctor_rewriter
        ys = sorted({x for p in lits for t in p for x in vars_of([t])
                     if self.table.is_finite(x.sort)}, key=term_key)
        for combo in itertools.product(*(self.table.reps(y.sort) for y in ys)):
            tau = dict(zip(ys, combo))
            inst = [(apply(u, tau), apply(v, tau)) for u, v in lits]
            if not all(crw.is_normalized(u) and crw.is_normalized(v) for u, v in inst):
                continue
            if all(u is not v for u, v in inst):
                full = compose(compose(subst, dict(gamma)), tau)
                return Witness(inst, tau, restrict(full, self._formula_vars))
        return None


def satisfiable(theory: Theory, f: Formula, bounds: Bounds | None = None) -> Verdict:
    return Decider(theory, bounds).satisfiable(f)


def valid(theory: Theory, f: Formula, bounds: Bounds | None = None) -> Verdict:
    return Decider(theory, bounds).valid(f)
