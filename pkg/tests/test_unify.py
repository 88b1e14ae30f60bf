from __future__ import annotations

import pytest

from varsat.parser import parse_theory
from varsat.terms import FreshVars, Var, apply
from varsat.unify import alpha_equivalent, b_equal, match, minimize

from conftest import T

SMALL = """
theory SMALL is
  sorts S .
  op a : -> S [ctor] .
  op b : -> S [ctor] .
  op g : S -> S [ctor] .
  op f : S S -> S [ctor comm] .
  op _*_ : S S -> S [ctor assoc comm] .
  vars x y z : S .
endth
"""


@pytest.fixture(scope="module")
def small():
    return parse_theory(SMALL)


def unify(th, text, away=()):
    from varsat.parser import parse_equations
    eqs = parse_equations(th, text)
    return eqs, th.unifier.unify(eqs, FreshVars(), away)


def sound(eqs, sigmas):
    return all(apply(u, s) is apply(v, s) for s in sigmas for u, v in eqs)


def test_b_equal(natset):
    assert b_equal(T(natset, "1 + 0"), T(natset, "1"))
    assert b_equal(T(natset, "0 , 1"), T(natset, "1 , 0"))
    assert not b_equal(T(natset, "0"), T(natset, "1"))


def test_ac_matching_enumerates_splits(natset):
    p = T(natset, "NS , NS'")
    s = T(natset, "0 , 1")
    ns, ns2 = Var("NS", "NatSet"), Var("NS'", "NatSet")
    found = {(m[ns], m[ns2]) for m in match(p, s, natset.leq)}
    zero, one = T(natset, "0"), T(natset, "1")
    assert found == {(zero, one), (one, zero)}


def test_matching_basics(peanoctor):
    x = Var("x", "Nat")
    t = T(peanoctor, "s(0)")
    assert list(match(x, t, peanoctor.leq)) == [{x: t}]
    assert list(match(T(peanoctor, "s(x)"), T(peanoctor, "0"), peanoctor.leq)) == []


def test_acu_unification_example(natset):
    eqs, sols = unify(natset, "N + M = 1")
    n, m = Var("N", "Nat"), Var("M", "Nat")
    one, zero = T(natset, "1"), T(natset, "0")
    images = {(s.get(n, n), s.get(m, m)) for s in sols}
    assert images == {(one, zero), (zero, one)}
    assert sound(eqs, sols)


def test_comm_unification_is_minimized(natset):
    eqs, sols = unify(natset, "max(N, 0) = max(0, M)")
    assert len(sols) == 1
    s = sols[0]
    n, m = Var("N", "Nat"), Var("M", "Nat")
    assert apply(n, s) is apply(m, s)
    assert sound(eqs, sols)


def test_trivial_equation_gives_identity(natset):
    eqs, sols = unify(natset, "N = N")
    assert sols == [{}]


def test_free_clash_and_occurs(peanoctor):
    assert unify(peanoctor, "s(x) = 0")[1] == []
    assert unify(peanoctor, "s(x) = x")[1] == []
    eqs, sols = unify(peanoctor, "s(x) = s(s(y))")
    assert len(sols) == 1 and sound(eqs, sols)


def test_ac_without_identity(small):
    eqs, sols = unify(small, "x * y = a * b")
    assert sound(eqs, sols)
    assert len(sols) == 2
    eqs, sols = unify(small, "x * y = a")
    assert sols == []


def test_ac_with_variables_on_both_sides(small):
    eqs, sols = unify(small, "x * y = z * a")
    assert sound(eqs, sols)
    assert sols


def test_unifiers_avoid_given_variables(natset):
    v2 = Var("V1", "Nat")
    eqs, sols = unify(natset, "N + M = N + 1", away={v2})
    for s in sols:
        for t in s.values():
            from varsat.terms import term_vars
            assert v2 not in term_vars(t)


def test_sort_intersection(listsel):
    eqs, sols = unify(listsel, "l = X:NeList")
    assert len(sols) == 1 and sound(eqs, sols)
    eqs, sols = unify(listsel, "nil = X:NeList")
    assert sols == []


def test_alpha_equivalence(natset):
    a = T(natset, "V1:Nat + V2:Nat")
    b = T(natset, "V7:Nat + V3:Nat")
    c = T(natset, "V7:Nat + V7:Nat")
    assert alpha_equivalent([a], [b], natset.leq)
    assert not alpha_equivalent([a], [c], natset.leq)


def test_minimize_drops_instances(natset):
    n = Var("N", "Nat")
    general = {n: T(natset, "V1:Nat + 1")}
    specific = {n: T(natset, "1 + 1")}
    assert minimize([specific, general], [n], natset.leq) == [general]
