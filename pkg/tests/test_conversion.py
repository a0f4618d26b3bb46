"""Normalizer and separation tests.

Church-numeral arithmetic is the independent oracle for the normalizer:
numbers come back from normalization and must match plain Python ints.
"""

import random

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from lesim.conversion import (
    FALSE, ConvEnv, FuelExhausted, Normalizer, TRUE, apply_context,
    bohm_separate, kind_conv, type_conv, type_whnf,
)
from lesim.core import (
    KStar, PApp, PArm, PCase, PCtor, PFix, PLam, PVar, TAll, TAppT, TAppTm,
    TEq, TLam, TPi, TVar, Var, alpha_eq, papps,
)

from nf_gen import gen_closed_nf, term_size


def lam(*spec):
    *vs, body = spec
    for v in reversed(vs):
        body = PLam(v, body)
    return body


def church(n: int):
    body = PVar("z")
    for _ in range(n):
        body = PApp(PVar("s"), body)
    return lam("s", "z", body)


def church_nf(n: int):
    # the eta-normal form of a numeral (1 collapses to \s.s)
    return Normalizer(fuel=1000).normalize(church(n))


ADD = lam("m", "n", "s", "z",
          PApp(PApp(PVar("m"), PVar("s")), PApp(PApp(PVar("n"), PVar("s")), PVar("z"))))
MUL = lam("m", "n", "s", PApp(PVar("m"), PApp(PVar("n"), PVar("s"))))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 12), st.integers(0, 12))
def test_church_add_matches_python(m, n):
    t = PApp(PApp(ADD, church(m)), church(n))
    assert alpha_eq(Normalizer(fuel=10000).normalize(t), church_nf(m + n))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8))
def test_church_mul_matches_python(m, n):
    t = PApp(PApp(MUL, church(m)), church(n))
    assert alpha_eq(Normalizer(fuel=10000).normalize(t), church_nf(m * n))


def test_eta_contraction():
    n = Normalizer()
    assert n.normalize(lam("x", PApp(PVar("f"), PVar("x")))) == PVar("f")
    # not an eta redex: bound variable occurs in the function part
    t = lam("x", PApp(PApp(PVar("x"), PVar("y")), PVar("x")))
    assert n.normalize(t) == t


def test_eta_contraction_on_ctor_forms():
    n = Normalizer()
    assert n.normalize(lam("x", PCtor("cons", (PVar("h"), PVar("x"))))) == PCtor("cons", (PVar("h"),))


def test_ctor_materialization_and_absorption():
    n = Normalizer(ctors={"succ", "zero"})
    t = PApp(PVar("succ"), PVar("zero"))
    assert n.normalize(t) == PCtor("succ", (PCtor("zero", ()),))


def test_case_selects_matching_arm():
    n = Normalizer()
    t = PCase(PCtor("cons", (PVar("h"), PVar("t"))), (
        PArm("nil", (), PVar("e")),
        PArm("cons", ("a", "b"), PApp(PVar("f"), PVar("a"))),
    ))
    assert n.normalize(t) == PApp(PVar("f"), PVar("h"))


def test_case_stuck_on_non_ctor():
    n = Normalizer()
    t = PCase(PVar("s"), (PArm("nil", (), PVar("e")),))
    assert n.normalize(t) == t


def test_fix_unfolds_on_ctor_only():
    # plus in unary arithmetic by recursion on the first argument
    plus = PFix("go", "m", (
        PArm("zero", (), lam("k", PVar("k"))),
        PArm("succ", ("p",), lam("k", PCtor("succ", (PApp(PApp(PVar("go"), PVar("p")), PVar("k")),)))),
    ))

    def nat(k):
        t = PCtor("zero", ())
        for _ in range(k):
            t = PCtor("succ", (t,))
        return t

    n = Normalizer(fuel=10000)
    got = n.normalize(PApp(PApp(plus, nat(3)), nat(4)))
    assert got == nat(7)
    stuck = PApp(plus, PVar("m"))
    assert n.normalize(stuck) == stuck


def test_out_in_law():
    n = Normalizer()
    t = PApp(PVar("out"), PCtor("in", (PVar("xs"),)))
    assert n.normalize(t) == PVar("xs")


def test_ind_law():
    n = Normalizer(fuel=1000)
    t = PApp(PApp(PVar("ind"), PVar("alg")), PCtor("in", (PVar("xs"),)))
    got = n.normalize(t)
    want = PApp(PApp(PVar("alg"),
                     PLam("r", PApp(PApp(PVar("ind"), PVar("alg")), PVar("r")))),
                PVar("xs"))
    assert alpha_eq(got, Normalizer(fuel=1000).normalize(want))


def test_def_unfolding_is_not_a_step():
    n = Normalizer(defs={"two": PCtor("succ", (PCtor("succ", (PCtor("zero", ()),)),))})
    out = n.normalize(PVar("two"))
    assert out == PCtor("succ", (PCtor("succ", (PCtor("zero", ()),)),))
    assert n.steps == 0


def test_fuel_runs_out_on_divergence():
    omega = PApp(lam("x", PApp(PVar("x"), PVar("x"))), lam("x", PApp(PVar("x"), PVar("x"))))
    with pytest.raises(FuelExhausted):
        Normalizer(fuel=500).normalize(omega)


# ------------------------------------------------------------------ types

def test_type_whnf_unfolds_abbreviations():
    env = ConvEnv(typedefs={"Id": TLam("X", KStar(), TVar("X"))})
    assert type_whnf(TAppT(TVar("Id"), TVar("A")), env) == TVar("A")


def test_type_conv_alpha_and_beta():
    env = ConvEnv()
    a = TPi("x", TVar("A"), TAppTm(TLam("y", TVar("A"), TEq(Var("y"), Var("y"))), Var("x")))
    b = TPi("z", TVar("A"), TEq(Var("z"), Var("z")))
    assert type_conv(a, b, env)


def test_type_conv_compares_terms_by_erasure():
    env = ConvEnv()
    a = TEq(Var("x"), PVar("x") and Var("x"))
    b = TEq(Var("x"), Var("y"))
    assert not type_conv(a, b, env)
    # erased application disappears, so these indices agree
    from lesim.core import AppI
    c = TEq(AppI(Var("x"), Var("p")), Var("x"))
    d = TEq(Var("x"), Var("x"))
    assert type_conv(c, d, env)


def test_type_conv_eta():
    env = ConvEnv()
    f = TVar("F")
    g = TLam("X", KStar(), TAppT(TVar("F"), TVar("X")))
    assert type_conv(f, g, env)
    assert type_conv(g, f, env)


def test_kind_conv():
    from lesim.core import KPi
    env = ConvEnv()
    assert kind_conv(KPi("X", KStar(), KStar()), KPi("Y", KStar(), KStar()), env)
    assert not kind_conv(KStar(), KPi("X", KStar(), KStar()), env)


def test_tall_dom_sort_mismatch():
    env = ConvEnv()
    a = TAll("X", KStar(), TVar("X"))
    b = TAll("x", TVar("T"), TVar("U"))
    assert not type_conv(a, b, env)


# ------------------------------------------------------------- separation

def sep_ok(a, b):
    r = bohm_separate(a, b)
    assert r.status == "separated"
    n = Normalizer(fuel=100000)
    assert alpha_eq(n.normalize(apply_context(r, a)), TRUE)
    assert alpha_eq(n.normalize(apply_context(r, b)), FALSE)
    return r


def test_separate_booleans():
    sep_ok(TRUE, FALSE)


def test_separate_distinct_ctors_open_terms():
    sep_ok(PCtor("zero", ()), PCtor("succ", (PVar("n"),)))


def test_separate_same_ctor_different_arg():
    sep_ok(PCtor("succ", (PCtor("zero", ()),)),
           PCtor("succ", (PCtor("succ", (PCtor("zero", ()),)),)))


def test_separate_arity_mismatch_heads():
    sep_ok(lam("x", PVar("x")), lam("x", "y", PVar("x")))


def test_separate_head_occurs_in_args():
    a = lam("h", PApp(PVar("h"), PApp(PVar("h"), PCtor("zero", ()))))
    b = lam("h", PApp(PVar("h"), PApp(PVar("h"), PCtor("succ", (PCtor("zero", ()),)))))
    sep_ok(a, b)


def test_separate_free_var_vs_ctor():
    sep_ok(PVar("x"), PCtor("nil", ()))


def test_equal_terms_report_equal():
    t = lam("x", "y", PApp(PVar("x"), PVar("y")))
    assert bohm_separate(t, lam("a", "b", PApp(PVar("a"), PVar("b")))).status == "equal"
    assert bohm_separate(PVar("x"), PVar("x")).status == "equal"


def test_eta_equal_pairs_are_equal_not_separable():
    assert bohm_separate(PVar("f"), lam("x", PApp(PVar("f"), PVar("x")))).status == "equal"


def test_random_distinct_nfs_separate():
    rng = random.Random(20260815)
    done = 0
    while done < 120:
        a, b = gen_closed_nf(rng), gen_closed_nf(rng)
        if alpha_eq(a, b):
            continue
        sep_ok(a, b)
        done += 1


def test_random_equal_nfs_report_equal():
    rng = random.Random(77)
    for _ in range(60):
        a = gen_closed_nf(rng)
        assert bohm_separate(a, a).status == "equal"
        assert term_size(a) <= 12
