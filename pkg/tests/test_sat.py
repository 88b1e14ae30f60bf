from __future__ import annotations

import pytest

from varsat.formula import Not
from varsat.oracle import brute_force_sat, verify_witness
from varsat.sat import INVALID, SAT, UNSAT, VALID, Decider, b_consistent
from varsat.terms import PRED, App
from varsat.theory import TheoryError
from varsat.unify import alpha_equivalent
from varsat.varunify import BoundExceeded, encode

from conftest import F, T, alpha_str


def decide(th, text, mode="sat"):
    d = Decider(th)
    f = F(th, text)
    return d.valid(f) if mode == "valid" else d.satisfiable(f)


def test_odd_even_valid(preds):
    v = decide(preds, "odd(N) = tt <=> even(N) =/= tt", "valid")
    assert v.status == VALID
    unify = v.steps("unify")
    assert unify[0].info["unifiers"] == []
    elim = v.steps("eliminate")[0]
    assert any(alpha_str(s).startswith(alpha_str("even(V1 + V1) =/= tt"))
               for s in elim.info["discarded"])


def test_monus_example_trace(preds):
    v = decide(preds, "N - M = 0 <=> (M > N = tt \\/ N = M)", "valid")
    assert v.status == VALID
    expected = [(T(preds, "(V2:Nat + V3:Nat) > V2:Nat"), preds.tt),
                (T(preds, "V2:Nat"), T(preds, "V2:Nat + V3:Nat"))]
    first = v.steps("unify")[0]
    assert any(alpha_equivalent(encode(expected).args, encode(c).args, preds.leq)
               for c in first.terms)
    raws = [s for t in v.steps("eliminate") for s in t.info["instances"]]
    assert alpha_str("V4 =/= V4 + 0") in {alpha_str(r) for r in raws}


def test_trichotomy_unsat_but_consistent(preds):
    text = "N > M =/= tt /\\ M > N =/= tt /\\ N =/= M"
    assert decide(preds, text).status == UNSAT
    f = F(preds, text)
    from varsat.formula import to_dnf
    (clause,) = to_dnf(f)
    assert b_consistent(preds, clause.diseqs)
    assert not b_consistent(preds, [(T(preds, "N"), T(preds, "N"))])
    assert b_consistent(preds, [(T(preds, "0"), T(preds, "1"))])


def test_peano_constructors_sat(peanoctor):
    v = decide(peanoctor, "s(x) =/= s(y) /\\ 0 =/= y")
    assert v.status == SAT
    ground = verify_witness(peanoctor, v.formula, v.witness.subst, v.witness.diseqs)
    assert ground is not None


def test_trivial_formulas(preds, peanoctor):
    assert decide(peanoctor, "0 = 0").status == SAT
    assert decide(peanoctor, "x = x", "valid").status == VALID
    assert decide(peanoctor, "x = 0", "valid").status == INVALID
    assert decide(peanoctor, "0 = s(0)").status == UNSAT


def test_listsel_validity(listsel):
    assert decide(listsel, "l = nil \\/ l : NeList = tt", "valid").status == VALID
    assert decide(listsel, "l : NeList = tt", "valid").status == INVALID


def test_selector_reasoning(listsel):
    assert decide(listsel, "head(n ; l) = n", "valid").status == VALID
    assert decide(listsel, "tail(n ; l) =/= l").status == UNSAT


def test_finite_sort_step(boolth):
    assert decide(boolth, "x or y = y or x", "valid").status == VALID
    assert decide(boolth, "x =/= true /\\ x =/= false").status == UNSAT
    assert decide(boolth, "x and y =/= x").status == SAT


def test_witnesses_check_out(preds):
    for text in ["N , NS =/= NS /\\ even(N) =/= tt", "max(N, M) =/= N", "N > M = tt /\\ odd(N) = tt"]:
        v = decide(preds, text)
        assert v.status == SAT
        assert verify_witness(preds, v.formula, v.witness.subst, v.witness.diseqs) is not None


def test_elimination_decreases_predicates(preds):
    v = decide(preds, "N > M =/= tt /\\ M > N =/= tt /\\ even(N) =/= tt")

    def count(pairs):
        return sum(1 for u, w in pairs for t in (u, w) if isinstance(t, App) and t.op.role == PRED)

    for step in v.steps("eliminate"):
        before = step.input.count("=/= tt")
        for out in step.terms:
            assert count(out) < before or count(out) == 0


def test_pred_variables_rejected(listsel):
    from varsat.terms import Var
    from varsat.formula import eq
    with pytest.raises(TheoryError):
        Decider(listsel).satisfiable(eq(Var("P", "Pred"), listsel.tt))


def test_pred_atoms_only_against_tt(preds):
    with pytest.raises(TheoryError):
        decide(preds, "odd(N) = even(M)")


def test_non_fvp_bound(peano):
    from varsat.variants import Bounds
    with pytest.raises(BoundExceeded):
        Decider(peano, Bounds(max_depth=4)).satisfiable(F(peano, "x + y = 0"))


def test_validity_duality(preds):
    f = F(preds, "N - M = 0 <=> (M > N = tt \\/ N = M)")
    d = Decider(preds)
    assert (d.valid(f).status == VALID) == (d.satisfiable(Not(f)).status == UNSAT)


@pytest.mark.parametrize("text", [
    "N - M =/= 0 /\\ M > N = tt",
    "min(N, M) = max(N, M) /\\ N =/= M",
    "N , M = M /\\ N =/= M",
    "even(N) = tt /\\ odd(N + 1) =/= tt",
    "N : Nat =/= tt",
    "NS : Nat = tt /\\ NS , 0 =/= NS /\\ NS =/= 0",
])
def test_agrees_with_oracle(preds, text):
    f = F(preds, text)
    v = Decider(preds).satisfiable(f)
    o = brute_force_sat(preds, f, 3)
    if o.found:
        assert v.status == SAT
    if v.status == UNSAT:
        assert not o.found
