"""End-to-end acceptance checks with their wall-clock budgets.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``;
either way one PASS/FAIL line per criterion is printed.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import F, T, alpha_str, theory  # noqa: E402

from varsat.formula import And, Not, Or, eq, formula_vars, neq, to_dnf  # noqa: E402
from varsat.oracle import brute_force_sat, enumerate_ground_terms, evaluate, verify_witness  # noqa: E402
from varsat.parser import parse_theory  # noqa: E402
from varsat.patterns import check_pattern_equivalences, without_pattern  # noqa: E402
from varsat.sat import SAT, UNSAT, VALID, Decider, b_consistent  # noqa: E402
from varsat.terms import CTOR, PRED, App, FreshVars, Var, apply, mk, term_vars  # noqa: E402
from varsat.unify import alpha_equivalent, match_all  # noqa: E402
from varsat.variants import BOUND_EXCEEDED, VariantEngine, fvp_check, subsumes  # noqa: E402
from varsat.varunify import encode  # noqa: E402

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(n: int, title: str, limit: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException as e:
        RESULTS[n] = f"FAIL  {n:2d}  {title}  ({type(e).__name__}: {str(e)[:80]})"
        print(RESULTS[n])
        raise
    took = time.perf_counter() - start
    ok = took < limit
    RESULTS[n] = f"{'PASS' if ok else 'FAIL'}  {n:2d}  {title}  ({took:.2f}s / {limit:g}s)"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def engine(th):
    return VariantEngine(th.rules, th.rewriter, th.unifier)


# --- 1-8: worked examples -----------------------------------------------------

def test_c01_natset_fvp():
    with criterion(1, "natset is FVP with variant complexity 20", 30):
        th = theory("natset")
        rep = fvp_check(engine(th), th.signature.ops.values())
        assert rep.fvp and rep.complexity == 20


def test_c02_or_variants():
    with criterion(2, "x or y has exactly 3 variants", 5):
        th = theory("bool")
        res = engine(th).narrow(T(th, "x or y"))
        assert res.complete and len(res) == 3
        x, y = Var("x", "Bool"), Var("y", "Bool")
        tr, fa = T(th, "true"), T(th, "false")
        expected = [(T(th, "x or y"), {}), (x, {y: fa}), (tr, {y: tr})]
        for term, sub in expected:
            image = [term, sub.get(x, x), sub.get(y, y)]
            assert any(alpha_equivalent(image, v.image([x, y]), th.leq) for v in res.variants)


def _open_sum(t) -> bool:
    while isinstance(t, App) and t.op.name == "s":
        t = t.args[0]
    return isinstance(t, App) and t.op.name == "_+_"


def test_c03_peano_not_fvp():
    with criterion(3, "peano _+_ is not FVP up to bound", 30):
        th = theory("peano")
        rep = fvp_check(engine(th), th.signature.ops.values())
        plus = rep.symbol("_+_")
        assert plus.status == BOUND_EXCEEDED and not rep.fvp
        src = sorted(term_vars(plus.source), key=lambda v: v.name)
        sums = [v for v in plus.variants if _open_sum(v.term)]
        assert len(sums) >= 5
        for a, b in itertools.permutations(sums, 2):
            assert not subsumes(a, b, src, th.leq)


def test_c04_odd_even():
    with criterion(4, "odd(N) = tt <=> even(N) =/= tt is valid", 30):
        th = theory("natsetpreds")
        v = Decider(th).valid(F(th, "odd(N) = tt <=> even(N) =/= tt"))
        assert v.status == VALID
        assert v.steps("unify")[0].info["unifiers"] == []
        target = alpha_str("even(V1 + V1) =/= tt")
        discarded = [alpha_str(s) for st in v.steps("eliminate") for s in st.info["discarded"]]
        assert any(s.startswith(target) for s in discarded)


def test_c05_monus():
    with criterion(5, "N - M = 0 <=> (M > N = tt \\/ N = M) is valid", 60):
        th = theory("natsetpreds")
        v = Decider(th).valid(F(th, "N - M = 0 <=> (M > N = tt \\/ N = M)"))
        assert v.status == VALID
        want = encode([(T(th, "(V2:Nat + V3:Nat) > V2:Nat"), th.tt),
                       (T(th, "V2:Nat"), T(th, "V2:Nat + V3:Nat"))]).args
        assert any(alpha_equivalent(want, encode(c).args, th.leq)
                   for st in v.steps("unify") for c in st.terms)
        raws = {alpha_str(r) for st in v.steps("eliminate") for r in st.info["instances"]}
        assert alpha_str("V4 =/= V4 + 0") in raws


def test_c06_trichotomy():
    with criterion(6, "trichotomy negation is unsat yet B-consistent", 60):
        th = theory("natsetpreds")
        f = F(th, "N > M =/= tt /\\ M > N =/= tt /\\ N =/= M")
        assert Decider(th).satisfiable(f).status == UNSAT
        (clause,) = to_dnf(f)
        assert b_consistent(th, clause.diseqs)


def test_c07_peano_ctor_sat():
    with criterion(7, "s(x) =/= s(y) /\\ 0 =/= y is sat with a checked witness", 5):
        th = theory("peanoctor")
        f = F(th, "s(x) =/= s(y) /\\ 0 =/= y")
        v = Decider(th).satisfiable(f)
        assert v.status == SAT
        ground = verify_witness(th, f, v.witness.subst, v.witness.diseqs)
        assert ground is not None and evaluate(th, f, ground)


def test_c08_listsel():
    with criterion(8, "l = nil \\/ l : NeList = tt is valid", 30):
        th = theory("listsel")
        assert Decider(th).valid(F(th, "l = nil \\/ l : NeList = tt")).status == VALID


# --- 9: random formulas against the brute-force oracle ----------------------

def _random_term(rng, th, sort, pool, height):
    ops = [op for op in th.signature.ops.values()
           if op.role != PRED and th.leq(op.result, sort) and (op.arity == 0 or height > 0)]
    vs = [x for x in pool if th.leq(x.sort, sort)]
    if vs and (height == 0 or rng.random() < 0.45):
        return rng.choice(vs)
    # sorts without constants (NeList, NzNat) need one more level
    op = rng.choice(ops or [op for op in th.signature.ops.values()
                            if op.role != PRED and th.leq(op.result, sort)])
    return mk(op, [_random_term(rng, th, s, pool, height - 1) for s in op.arg_sorts])


def _random_literal(rng, th, pool, eq_sorts):
    preds = [op for op in th.signature.ops.values() if op.role == PRED]
    if preds and rng.random() < 0.4:
        p = rng.choice(preds)
        lhs, rhs = mk(p, [_random_term(rng, th, s, pool, 1) for s in p.arg_sorts]), th.tt
    else:
        s = rng.choice(eq_sorts)
        lhs, rhs = (_random_term(rng, th, s, pool, 2) for _ in range(2))
    return eq(lhs, rhs) if rng.random() < 0.5 else neq(lhs, rhs)


def _random_formula(rng, th, pool, eq_sorts):
    lits = [_random_literal(rng, th, pool, eq_sorts) for _ in range(rng.randint(1, 4))]
    while len(lits) > 1:
        i = rng.randrange(len(lits) - 1)
        a, b = lits[i], lits[i + 1]
        node = And((a, b)) if rng.random() < 0.6 else Or((a, b))
        lits[i:i + 2] = [Not(node) if rng.random() < 0.15 else node]
    return lits[0]


def _pools(name):
    if name == "natsetpreds":
        N, M, K, NS = Var("N", "Nat"), Var("M", "Nat"), Var("K", "Nat"), Var("NS", "NatSet")
        return [[N], [N, M], [N, M, K], [N, NS], [N, M, NS]], ["Nat", "NatSet"]
    n, m, l, k = Var("n", "Nat"), Var("m", "Nat"), Var("l", "List"), Var("k", "List")
    return [[l], [n, l], [l, k], [n, m, l], [n, l, k]], ["Nat", "List"]


def test_c09_random_formulas():
    with criterion(9, "satisfiable agrees with the depth-3 oracle on 400 formulas", 600):
        rng = random.Random(20261016)
        checked, decided = 0, {SAT: 0, UNSAT: 0}
        for name in ("natsetpreds", "lists", "listsel"):
            th = theory(name)
            d = Decider(th)
            pools, eq_sorts = _pools(name)
            for i in range(200 if name == "natsetpreds" else 100):
                f = _random_formula(rng, th, pools[i % len(pools)], eq_sorts)
                v = d.satisfiable(f)
                o = brute_force_sat(th, f, 3)
                decided[v.status] += 1
                assert not (o.found and v.status == UNSAT), (name, f)
                if v.status == SAT:
                    g = verify_witness(th, f, v.witness.subst, v.witness.diseqs)
                    assert g is not None and evaluate(th, f, g), (name, f)
                    assert set(g) >= formula_vars(f)
                checked += 1
        assert checked >= 200 and decided[SAT] and decided[UNSAT]


# --- 10: random unification problems ------------------------------------------

UNIF_THEORIES = {
    "free": "op g : S -> S [ctor] . op f : S S -> S [ctor] .",
    "C": "op g : S -> S [ctor] . op f : S S -> S [ctor comm] .",
    "AC": "op g : S -> S [ctor] . op _*_ : S S -> S [ctor assoc comm] .",
    "ACU": "op 0 : -> S [ctor] . op _+_ : S S -> S [ctor assoc comm id: 0] .",
}


def _unif_theory(body):
    return parse_theory(f"theory U is sorts S . op a : -> S [ctor] . op b : -> S [ctor] . "
                        f"{body} vars x y : S . endth")


def _random_open(rng, th, pool, height):
    ops = [op for op in th.signature.ops.values() if op.arity == 0 or height > 0]
    if height == 0 or rng.random() < 0.35:
        return rng.choice(pool) if rng.random() < 0.7 else mk(rng.choice(
            [op for op in ops if op.arity == 0]), ())
    op = rng.choice(ops)
    return mk(op, [_random_open(rng, th, pool, height - 1) for _ in op.arg_sorts])


def test_c10_random_unification():
    with criterion(10, "B-unification is sound and depth-2 ground complete on 1000 systems", 600):
        rng = random.Random(7)
        total = 0
        for kind, body in UNIF_THEORIES.items():
            th = _unif_theory(body)
            x, y = Var("x", "S"), Var("y", "S")
            ground = enumerate_ground_terms(th, "S", 2, roles=(CTOR,))
            for i in range(250):
                pool = [x] if i % 3 == 0 else [x, y]
                eqs = [(_random_open(rng, th, pool, 2), _random_open(rng, th, pool, 2))
                       for _ in range(1 + (i % 2))]
                vs = sorted({v for u, w in eqs for v in term_vars(u) | term_vars(w)},
                            key=lambda v: v.name)
                sols = th.unifier.unify(eqs, FreshVars(), vs)
                for s in sols:
                    assert all(apply(u, s) is apply(w, s) for u, w in eqs), (kind, eqs, s)
                images = [[s.get(v, v) for v in vs] for s in sols]
                for values in itertools.product(ground, repeat=len(vs)):
                    rho = dict(zip(vs, values))
                    if all(apply(u, rho) is apply(w, rho) for u, w in eqs):
                        assert any(next(match_all(im, list(values), th.leq), None) is not None
                                   for im in images), (kind, eqs, rho)
                total += 1
        assert total >= 1000


# --- 11: pattern equivalences ---------------------------------------------------

def test_c11_patterns():
    with criterion(11, "negative patterns pass at depth 3 and each one is necessary", 300):
        th = theory("natsetpreds")
        assert check_pattern_equivalences(th, 3).ok
        for i in range(len(th.patterns)):
            rep = check_pattern_equivalences(without_pattern(th, i), 3)
            assert not rep.ok and rep.counterexamples, i


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
