"""Syntax-level tests: erasure, substitution, alpha equality.

The substitution oracle here renames every binder to a globally fresh name
first and then substitutes naively; the production substitution must agree
with it up to alpha.
"""

import itertools

from hypothesis import assume, given, settings
import hypothesis.strategies as st

from lesim.core import (
    App, AppI, AppT, Beta, Branch, BranchVar, Builtin, Delta, Fix, ID,
    IntrCast, Lam, LamI, Match, Motive, PApp, PArm, PCase, PCtor, PFix,
    PLam, PVar, Phi, PureTerm, Rho, TEq, TVar, Var, alpha_eq, erase,
    free_names, fresh_name, mk_app, papp, split_app, subst, subst1,
)

# ---------------------------------------------------------------- the oracle


def _uniquify(t, env, ctr):
    match t:
        case PVar(x):
            return PVar(env.get(x, x))
        case PLam(x, b):
            x2 = f"u{next(ctr)}"
            return PLam(x2, _uniquify(b, {**env, x: x2}, ctr))
        case PApp(f, a):
            return PApp(_uniquify(f, env, ctr), _uniquify(a, env, ctr))
        case PCtor(c, args):
            return PCtor(c, tuple(_uniquify(a, env, ctr) for a in args))
        case PCase(s, arms):
            return PCase(_uniquify(s, env, ctr),
                         tuple(_uniquify_arm(a, env, ctr) for a in arms))
        case PFix(f, x, arms):
            f2, x2 = f"u{next(ctr)}", f"u{next(ctr)}"
            env2 = {**env, f: f2, x: x2}
            return PFix(f2, x2, tuple(_uniquify_arm(a, env2, ctr) for a in arms))
    raise AssertionError(t)


def _uniquify_arm(a, env, ctr):
    vs = tuple(f"u{next(ctr)}" for _ in a.vars)
    env2 = {**env, **dict(zip(a.vars, vs))}
    return PArm(a.ctor, vs, _uniquify(a.body, env2, ctr))


def _naive(t, mapping):
    # only sound when no binder of t occurs in the mapping
    match t:
        case PVar(x):
            return mapping.get(x, t)
        case PLam(x, b):
            return PLam(x, _naive(b, mapping))
        case PApp(f, a):
            return PApp(_naive(f, mapping), _naive(a, mapping))
        case PCtor(c, args):
            return PCtor(c, tuple(_naive(a, mapping) for a in args))
        case PCase(s, arms):
            return PCase(_naive(s, mapping),
                         tuple(PArm(a.ctor, a.vars, _naive(a.body, mapping)) for a in arms))
        case PFix(f, x, arms):
            return PFix(f, x, tuple(PArm(a.ctor, a.vars, _naive(a.body, mapping)) for a in arms))
    raise AssertionError(t)


def oracle_subst(t, mapping):
    return _naive(_uniquify(t, {}, itertools.count()), mapping)


# ------------------------------------------------------------- term builders

NAMES = st.sampled_from(list("abcfxyz"))
CTORS = st.sampled_from(["mk", "cons", "nil"])


def pure_terms():
    def arm(body):
        return st.builds(
            PArm, CTORS, st.lists(NAMES, max_size=2, unique=True).map(tuple), body)

    return st.recursive(
        st.builds(PVar, NAMES),
        lambda sub: st.one_of(
            st.builds(PLam, NAMES, sub),
            st.builds(PApp, sub, sub),
            st.builds(PCtor, CTORS, st.lists(sub, max_size=2).map(tuple)),
            st.builds(PCase, sub, st.lists(arm(sub), min_size=1, max_size=2).map(tuple)),
            st.builds(PFix, NAMES, NAMES, st.lists(arm(sub), min_size=1, max_size=2).map(tuple)),
        ),
        max_leaves=12,
    )


def mappings():
    return st.dictionaries(NAMES, pure_terms(), min_size=1, max_size=2)


@settings(max_examples=300, deadline=None)
@given(pure_terms(), mappings())
def test_subst_matches_oracle(t, mapping):
    assert alpha_eq(subst(t, dict(mapping)), oracle_subst(t, mapping))


@settings(max_examples=200, deadline=None)
@given(pure_terms(), NAMES)
def test_subst_of_nonfree_is_identity(t, x):
    if x not in free_names(t):
        assert alpha_eq(subst1(t, x, PVar("q'")), t)


@settings(max_examples=200, deadline=None)
@given(pure_terms())
def test_alpha_reflexive(t):
    assert alpha_eq(t, t)
    assert alpha_eq(t, _uniquify(t, {}, itertools.count()))


@settings(max_examples=200, deadline=None)
@given(pure_terms(), mappings())
def test_subst_then_free_names(t, mapping):
    out = free_names(subst(t, dict(mapping)))
    expect = set()
    for x in free_names(t):
        if x in mapping:
            expect |= free_names(mapping[x])
        else:
            expect.add(x)
    assert set(out) == expect


# ------------------------------------------------------------ capture basics

def test_classic_capture():
    t = PLam("y", PVar("x"))
    out = subst1(t, "x", PVar("y"))
    assert alpha_eq(out, PLam("w", PVar("y")))
    assert not alpha_eq(out, PLam("y", PVar("y")))


def test_case_arm_capture():
    t = PCase(PVar("s"), (PArm("mk", ("v",), PApp(PVar("v"), PVar("x"))),))
    out = subst1(t, "x", PVar("v"))
    arm = out.arms[0]
    assert arm.vars[0] != "v"
    assert alpha_eq(arm.body, PApp(PVar(arm.vars[0]), PVar("v")))


def test_two_arms_same_binder_name():
    t = PFix("f", "s", (
        PArm("mk", ("n",), PApp(PVar("n"), PVar("z"))),
        PArm("nil", ("n",), PApp(PVar("z"), PVar("n"))),
    ))
    out = subst1(t, "z", PVar("n"))
    a0, a1 = out.arms
    assert alpha_eq(a0.body, PApp(PVar(a0.vars[0]), PVar("n")))
    assert alpha_eq(a1.body, PApp(PVar("n"), PVar(a1.vars[0])))


def test_fix_binds_its_own_name():
    t = PFix("f", "s", (PArm("mk", (), PApp(PVar("f"), PVar("x"))),))
    out = subst1(t, "f", PVar("boom"))
    assert alpha_eq(out, t)


def test_fresh_name_primes():
    assert fresh_name("x", set()) == "x"
    assert fresh_name("x", {"x"}) == "x'"
    assert fresh_name("x", {"x", "x'"}) == "x''"


# ------------------------------------------------------------------- erasure

def test_erase_drops_invisible_structure():
    inner = Lam("x", None, Var("x"))
    t = LamI("X", None, AppT(AppI(App(inner, Var("y")), Var("p")), TVar("X")))
    assert erase(t) == PApp(PLam("x", PVar("x")), PVar("y"))


def test_erase_proof_forms_are_identity():
    for t in (Beta(), Delta(Var("p")), IntrCast(Var("f"), Var("p"))):
        assert erase(t) == ID


def test_erase_phi_takes_shadow():
    t = Phi(Var("q"), Var("good"), App(Var("f"), Var("raw")))
    assert erase(t) == PApp(PVar("f"), PVar("raw"))


def test_erase_rho_takes_body():
    t = Rho(Var("q"), "v", TEq(Var("v"), Var("z")), Beta())
    assert erase(t) == ID


def test_erase_match_keeps_relevant_vars_only():
    br = Branch(
        "cons",
        (BranchVar("n", "erased"), BranchVar("h", "term"), BranchVar("t", "term")),
        ("e",),
        App(Var("h"), Var("t")),
    )
    t = Match(Var("s"), Motive((), "v", TVar("A")), (br,))
    assert erase(t) == PCase(PVar("s"), (PArm("cons", ("h", "t"), PApp(PVar("h"), PVar("t"))),))


def test_erase_builtins():
    assert erase(Builtin("in")) == PCtor("in", ())
    assert erase(App(AppI(Builtin("in"), Var("m")), Var("xs"))) == PCtor("in", (PVar("xs"),))
    assert erase(Builtin("out")) == PVar("out")


def test_papp_absorbs_into_ctor():
    assert papp(PCtor("c", ()), PVar("x")) == PCtor("c", (PVar("x"),))
    assert papp(PVar("f"), PVar("x")) == PApp(PVar("f"), PVar("x"))


# ------------------------------------------------- core subst/erase coherence

def core_terms():
    return st.recursive(
        st.one_of(st.builds(Var, NAMES), st.just(Beta())),
        lambda sub: st.one_of(
            st.builds(Lam, NAMES, st.none(), sub),
            st.builds(LamI, NAMES, st.none(), sub),
            st.builds(App, sub, sub),
            st.builds(AppI, sub, sub),
            st.builds(Phi, sub, sub, sub),
        ),
        max_leaves=10,
    )


def _erasure_disciplined(t) -> bool:
    # the checker's side condition: an erased binder must not survive into
    # the body's erasure; commutation only holds for such terms
    match t:
        case LamI(x, _, b):
            return x not in free_names(erase(b)) and _erasure_disciplined(b)
        case Lam(_, _, b):
            return _erasure_disciplined(b)
        case App(f, a) | AppI(f, a):
            return _erasure_disciplined(f) and _erasure_disciplined(a)
        case Phi(e, m, s):
            return all(map(_erasure_disciplined, (e, m, s)))
        case _:
            return True


@settings(max_examples=200, deadline=None)
@given(core_terms(), NAMES, core_terms())
def test_erase_commutes_with_subst(t, x, v):
    assume(_erasure_disciplined(t))
    lhs = erase(subst1(t, x, v))
    rhs = subst1(erase(t), x, erase(v))
    assert alpha_eq(lhs, rhs)


def test_match_subst_avoids_motive_capture():
    mot = Motive(("n",), "v", TEq(Var("n"), Var("k")))
    t = Match(Var("s"), mot, ())
    out = subst1(t, "k", Var("n"))
    assert out.motive.ivars[0] != "n"
    assert alpha_eq(out.motive.body, TEq(Var("n'"), Var("n")))


def test_fix_subst_renames_function_name():
    br = Branch("mk", (BranchVar("a", "term"),), (), App(Var("go"), Var("k")))
    t = Fix("go", "s", Motive((), "v", TVar("A")), (br,))
    out = subst1(t, "k", Var("go"))
    assert out.fn != "go"
    assert alpha_eq(out.branches[0].body, App(Var(out.fn), Var("go")))


def test_spine_roundtrip():
    t = mk_app(Var("f"), [("term", Var("a")), ("erased", Var("b")), ("type", TVar("X"))])
    head, args = split_app(t)
    assert head == Var("f")
    assert args == [("term", Var("a")), ("erased", Var("b")), ("type", TVar("X"))]
