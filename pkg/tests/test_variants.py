from __future__ import annotations

import itertools

from varsat.oracle import brute_force_variants
from varsat.terms import App, Var
from varsat.unify import match_all
from varsat.variants import BOUND_EXCEEDED, COMPLETE, Variant, fvp_check, subsumes

from conftest import T, engine


def test_bool_or_has_three_variants(boolth):
    res = engine(boolth).narrow(T(boolth, "x or y"))
    assert res.status == COMPLETE
    got = {(v.term, tuple(sorted(v.subst.items(), key=lambda kv: kv[0].name))) for v in res.variants}
    x, y = Var("x", "Bool"), Var("y", "Bool")
    tr, fa = T(boolth, "true"), T(boolth, "false")
    assert got == {(T(boolth, "x or y"), ()), (x, ((y, fa),)), (tr, ((y, tr),))}


def test_ground_term_single_variant(natset):
    res = engine(natset).narrow(T(natset, "0"))
    assert res.complete and [v.term for v in res.variants] == [T(natset, "0")]


def test_subsumption(boolth):
    x, y = Var("x", "Bool"), Var("y", "Bool")
    tr, fa = T(boolth, "true"), T(boolth, "false")
    src = [x, y]
    leq = boolth.leq
    assert subsumes(Variant(x, {y: fa}), Variant(tr, {x: tr, y: fa}), src, leq)
    assert not subsumes(Variant(T(boolth, "x or y"), {}), Variant(x, {y: fa}), src, leq)
    v = Variant(T(boolth, "x or y"), {})
    assert subsumes(v, v, src, leq)


def test_natset_complexity(natset):
    rep = fvp_check(engine(natset), natset.signature.ops.values())
    assert rep.fvp
    counts = {s.op: s.count for s in rep.symbols}
    assert counts == {"_,_": 7, "_<=_": 4, "max": 3, "min": 3, "_-_": 3}
    assert rep.complexity == 20


def test_free_constructors_have_complexity_zero(peanoctor):
    rep = fvp_check(engine(peanoctor), peanoctor.signature.ops.values())
    assert rep.fvp and rep.complexity == 0


def test_peano_addition_exceeds_bound(peano):
    res = engine(peano, max_depth=6).narrow(T(peano, "x + y"))
    assert res.status == BOUND_EXCEEDED
    assert sum(1 for v in res.variants if _open_sum(v.term)) >= 5
    # pairwise incomparable
    src = [Var("x", "Nat"), Var("y", "Nat")]
    for a, b in itertools.permutations(res.variants, 2):
        assert not subsumes(a, b, src, peano.leq)


def _open_sum(t) -> bool:
    """``t`` has the shape ``s(...s(x + y')...)``."""
    while isinstance(t, App) and t.op.name == "s":
        t = t.args[0]
    return isinstance(t, App) and t.op.name == "_+_"


def test_constructor_variants_of_predicate(preds):
    res = engine(preds).narrow(T(preds, "odd(N)"))
    non_tt = [v for v in res.variants if v.term is not preds.tt and preds.is_ctor_term(v.term)]
    assert [v.term for v in non_tt] == [T(preds, "odd(N)")]
    assert non_tt[0].subst == {}


def test_constructor_variants_of_or(boolth):
    res = engine(boolth).narrow(T(boolth, "x or y"))
    ctor = [v for v in res.variants if boolth.is_ctor_term(v.term)]
    assert len(ctor) == 2


def _covered(variants, t, ground, leq):
    """Some variant (u, theta) has a ground instance matching (normal form, rho)."""
    vs = sorted({v for v in ground[1]}, key=lambda v: v.name)
    target = [ground[0], *(ground[1][v] for v in vs)]
    for var in variants:
        pats = [var.term, *(var.subst.get(v, v) for v in vs)]
        if next(iter(match_all(pats, target, leq)), None) is not None:
            return True
    return False


def test_variants_cover_ground_instances(natset, boolth):
    for th, src, depth in ((natset, "max(N, M)", 2), (natset, "N - M", 2),
                           (natset, "NS , NS'", 1), (boolth, "x and y", 0)):
        t = T(th, src)
        res = engine(th).narrow(t)
        for nf, rho in brute_force_variants(th, t, depth):
            assert _covered(res.variants, t, (nf, rho), th.leq), (src, nf, rho)
