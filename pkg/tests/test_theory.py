from __future__ import annotations

import pytest

from varsat.finite import FINITE, INFINITE, UNKNOWN, UnknownFiniteness, compute_finite_sorts
from varsat.oracle import enumerate_ground_terms
from varsat.parser import parse_theory
from varsat.patterns import COVERAGE, check_pattern_equivalences, without_pattern
from varsat.selectors import selector_transform
from varsat.theory import TheoryError
from varsat.validate import validate_theory
from varsat.variants import fvp_check

from conftest import T, engine

HEAD = """theory BAD is
  sorts S Pred .
  op a : -> S [ctor] .
  op tt : -> Pred [ctor] .
  op ff : -> Pred [ctor] .
  var x : S .
"""


def conditions(text):
    return {d.condition for d in validate_theory(parse_theory(text)).errors}


def test_fixtures_are_valid(natset, preds, boolth, peano, peanoctor, lists, listsel):
    for th in (natset, preds, boolth, peano, peanoctor, lists, listsel):
        assert validate_theory(th).ok, th.name


def test_predicate_rule_must_target_tt():
    text = HEAD + "  op p : S -> Pred [pred] .\n  rl p(x) => ff .\nendth\n"
    assert "pi-rules" in conditions(text)


def test_non_linear_axiom_rejected():
    text = HEAD + "  op f : S S -> S [ctor assoc comm idem] .\nendth\n"
    assert "axioms-linear" in conditions(text)


def test_associativity_alone_rejected():
    text = HEAD + "  op f : S S -> S [ctor assoc] .\nendth\n"
    assert "axioms-supported" in conditions(text)


def test_identity_on_defined_symbol_rejected():
    text = HEAD + "  op f : S S -> S [assoc comm id: a] .\nendth\n"
    assert "delta-axioms" in conditions(text)


def test_predicate_must_target_pred():
    text = HEAD + "  op p : S -> S [pred] .\nendth\n"
    assert "preds-only" in conditions(text)


def test_empty_sort_rejected():
    text = "theory E is\n  sorts S T .\n  op a : -> S [ctor] .\n  op f : T -> T [ctor] .\nendth\n"
    assert "inhabited" in conditions(text)


def test_pattern_with_extra_constraint_variables_rejected():
    text = HEAD + ("  var y : S .\n  op p : S -> Pred [pred] .\n  op b : -> S [ctor] .\n"
                   "  npattern p(x) =/= tt if y =/= a .\nendth\n")
    assert "patterns" in conditions(text)


def test_finite_sorts(boolth, preds, natset):
    table = compute_finite_sorts(boolth)
    assert table.status("Bool") == FINITE
    assert set(table.reps("Bool")) == {T(boolth, "true"), T(boolth, "false")}
    table = compute_finite_sorts(preds)
    assert table.finite_sorts == []
    assert table.status("Nat") == INFINITE and table.status("NatSet") == INFINITE


def test_finite_representatives_are_distinct_normal_forms(boolth, listsel):
    for th in (boolth, listsel):
        table = compute_finite_sorts(th)
        for s in table.finite_sorts:
            reps = table.reps(s)
            assert len(set(reps)) == len(reps)
            assert all(th.rewriter.is_normalized(r) for r in reps)
            for t in enumerate_ground_terms(th, s, 3, ("constructor",)):
                assert sum(1 for r in reps if r is th.normalize(t)) == 1


def test_unknown_finiteness_needs_annotation():
    th = parse_theory("""theory W is
  sorts S .
  op a : -> S [ctor] .
  op f : S -> S [ctor] .
  var x : S .
  rl f(f(f(f(f(f(x)))))) => x .
endth
""")
    table = compute_finite_sorts(th, depth=4)
    assert table.status("S") == UNKNOWN
    with pytest.raises(UnknownFiniteness):
        table.reps("S")
    th.finite_annotations.add("S")
    assert compute_finite_sorts(th, depth=4).status("S") == FINITE


def test_listsel_pred_is_finite_warning(listsel):
    table = compute_finite_sorts(listsel)
    assert table.is_finite("Pred")
    rep = validate_theory(listsel, finite_table=table)
    assert rep.ok and any(d.condition == "finite-pred" for d in rep.warnings)


def test_pattern_check_passes(preds):
    assert check_pattern_equivalences(preds, 3).ok


def test_pattern_removal_detected(preds):
    idx = next(i for i, p in enumerate(preds.patterns)
               if p.pred.name == "even" and p.atom.args[0].op.name == "empty")
    rep = check_pattern_equivalences(without_pattern(preds, idx), 3)
    assert not rep.ok
    assert any(c.kind == COVERAGE and c.term is T(preds, "even(empty)") for c in rep.counterexamples)


def test_no_predicates_trivially_pass(natset):
    rep = check_pattern_equivalences(natset, 3)
    assert rep.ok and rep.predicates == []


def test_selector_transform_lists(lists):
    th = selector_transform(lists)
    assert th.leq("NeList", "List") and th.leq("NzNat", "Nat")
    assert th.normalize(T(th, "head(0 ; nil)")) is T(th, "0")
    assert th.normalize(T(th, "tail(0 ; nil)")) is T(th, "nil")
    assert th.normalize(T(th, "p(s(0))")) is T(th, "0")
    pats = {p.atom for p in th.patterns}
    assert T(th, "nil : NeList") in pats and T(th, "0 : NzNat") in pats
    assert validate_theory(th).ok
    rep = fvp_check(engine(th), th.signature.ops.values())
    assert rep.fvp
    assert check_pattern_equivalences(th, 3).ok


def test_selector_transform_constants_only():
    th = parse_theory("theory C is\n  sorts S .\n  op a : -> S [ctor] .\n  op b : -> S [ctor] .\nendth\n")
    out = selector_transform(th)
    assert out.sorts.sorts == ["S"] and out.rules == [] and out.patterns == []


def test_selector_transform_rejects_non_free(natset):
    with pytest.raises(TheoryError):
        selector_transform(natset)


def test_ill_sorted_selector_application(listsel):
    with pytest.raises(Exception):
        T(listsel, "head(l)")
