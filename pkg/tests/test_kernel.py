"""Checker behavior: datatypes, indexed matches, fixes, casts, mu."""

import pytest

from lesim.core import (
    App, AppI, AppT, Beta, Delta, KPi, KStar, Lam, LamI, TAll, TAppT, TAppTm,
    TCast, TEq, TPi, TTpEq, TVar, Var, alpha_eq, erase,
)
from lesim.kernel import (
    Context, TypingError, check, declare_data, declare_def, declare_typedef,
    infer, infer_kind,
)
from lesim.surface import DataDecl, DefDecl, TypeDecl, parse_program, parse_term, parse_type


def load(src, ctx=None):
    ctx = ctx if ctx is not None else Context()
    for d in parse_program(src):
        if isinstance(d, DefDecl):
            declare_def(ctx, d.name, d.ty, d.body)
        elif isinstance(d, TypeDecl):
            declare_typedef(ctx, d.name, d.kind, d.body)
        elif isinstance(d, DataDecl):
            declare_data(ctx, d.name, d.params, d.kind, d.ctors)
        else:
            raise AssertionError(f"kernel tests load only basic decls, got {d!r}")
    return ctx


NAT = """
data Nat : * = zero : Nat | succ : Pi n: Nat. Nat.
def one : Nat = succ zero.
def two : Nat = succ one.
def plus : Pi a: Nat. Pi b: Nat. Nat =
  fix pl (a) @ \\v. Pi b: Nat. Nat {
    zero -> \\b. b
  | succ n -> \\b. succ (pl n b)
  }.
"""

VEC = NAT + """
data Vec (A : *) : Pi n: Nat. * =
  vnil : Vec [A] zero
| vcons : all n: Nat. Pi x: A. Pi xs: Vec [A] n. Vec [A] (succ n).

def vhead : all A: *. all n: Nat. Pi v: Vec [A] (succ n). A =
  /\\A. /\\n. \\v. match v @ \\m. \\w. A {
    vnil / e -> delta -e
  | vcons -k x xs / e -> x
  }.

def vapp : all A: *. all k: Nat. Pi w: Vec [A] k. all m: Nat. Pi v: Vec [A] m. Vec [A] (plus m k) =
  /\\A. /\\k. \\w. fix ap (v) @ \\m. \\vv. Vec [A] (plus m k) {
    vnil -> w
  | vcons -n x xs -> vcons [A] -(plus n k) x (ap -n xs)
  }.
"""


def test_nat_and_plus_check():
    ctx = load(NAT)
    assert "plus" in ctx.defs


def test_plus_computes():
    ctx = load(NAT)
    lhs = parse_term("plus two two")
    rhs = parse_term("succ (succ (succ (succ zero)))")
    n = ctx.env.normalizer()
    assert alpha_eq(n.normalize(erase(lhs)), n.normalize(erase(rhs)))


def test_infer_ctor_type():
    ctx = load(NAT)
    ty = infer(ctx, {}, Var("succ"))
    assert alpha_eq(ty, TPi("n", TVar("Nat"), TVar("Nat")))


def test_gadt_vec_checks():
    ctx = load(VEC)
    assert "vhead" in ctx.defs and "vapp" in ctx.defs


def test_vapp_erasure_is_plain_recursion():
    ctx = load(VEC)
    # append [1] [2] at the term level, via erased indices
    t = parse_term(
        "vapp [Nat] -one (vcons [Nat] -zero two (vnil [Nat]))"
        " -one (vcons [Nat] -zero one (vnil [Nat]))")
    ty = infer(ctx, {}, t)
    want = parse_type("Vec [Nat] (plus one one)")
    n = ctx.env.normalizer()
    got = n.normalize(erase(t))
    expect = n.normalize(erase(parse_term("vcons [Nat] -one one (vcons [Nat] -zero two (vnil [Nat]))")))
    assert alpha_eq(got, expect)
    from lesim.conversion import type_conv
    assert type_conv(ty, want, ctx.env)


def test_match_without_motive_in_checked_position():
    ctx = load(NAT)
    src = """
def pred : Pi n: Nat. Nat = \\n. match n { zero -> zero | succ p -> p }.
"""
    load(src, ctx)
    n = ctx.env.normalizer()
    assert alpha_eq(n.normalize(erase(parse_term("pred two"))),
                    n.normalize(erase(parse_term("one"))))


def test_match_coverage_order_enforced():
    ctx = load(NAT)
    src = "def bad : Pi n: Nat. Nat = \\n. match n { succ p -> p | zero -> zero }."
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "coverage"


def test_match_missing_branch_rejected():
    ctx = load(NAT)
    with pytest.raises(TypingError) as e:
        load("def bad : Pi n: Nat. Nat = \\n. match n { zero -> zero }.", ctx)
    assert e.value.kind == "coverage"


def test_impossible_branch_needs_separable_equation():
    # on Vec [A] (succ n) the vnil equation {succ n ~ zero} discharges by delta
    ctx = load(VEC)
    t = parse_term("vhead [Nat] -one (vcons [Nat] -one one (vcons [Nat] -zero two (vnil [Nat])))")
    infer(ctx, {}, t)
    n = ctx.env.normalizer()
    assert alpha_eq(n.normalize(erase(t)), n.normalize(erase(parse_term("one"))))


def test_delta_rejected_on_equal_sides():
    ctx = load(NAT)
    with pytest.raises(TypingError) as e:
        load("def bad : Pi e: {zero ~ zero}. Nat = \\e. delta -e.", ctx)
    assert e.value.kind == "delta_inapplicable"


def test_delta_accepts_separable_open_sides():
    ctx = load(NAT)
    load("def fine : Pi n: Nat. Pi e: {zero ~ succ n}. Nat = \\n. \\e. delta -e.", ctx)


def test_beta_checks_conversion():
    ctx = load(NAT)
    load("def ok : {plus one one ~ two} = beta.", ctx)
    with pytest.raises(TypingError) as e:
        load("def no : {plus one one ~ one} = beta.", ctx)
    assert e.value.kind == "conversion_mismatch"


def test_rho_rewrites_goal_left_to_right():
    ctx = load(NAT)
    src = """
def symEq : Pi a: Nat. Pi b: Nat. Pi e: {a ~ b}. {b ~ a} =
  \\a. \\b. \\e. rho e @ v. {b ~ v} - beta.
"""
    load(src, ctx)


def test_phi_changes_erasure():
    ctx = load(NAT)
    load("def ph : Pi n: Nat. Pi e: {zero ~ n}. Nat = \\n. \\e. phi e - zero {n}.", ctx)
    body = ctx.defs["ph"][1]
    assert erase(body) == erase(parse_term("\\n. \\e. n"))


def test_erased_lambda_escape_rejected():
    ctx = load(NAT)
    with pytest.raises(TypingError) as e:
        load("def bad : all n: Nat. Nat = /\\n. n.", ctx)
    assert e.value.kind == "erased_var_escape"


def test_erased_pattern_var_escape_rejected():
    ctx = load(VEC)
    src = """
def bad : all A: *. all n: Nat. Pi v: Vec [A] (succ n). Nat =
  /\\A. /\\n. \\v. match v @ \\m. \\w. Nat {
    vnil / e -> zero
  | vcons -k x xs / e -> k
  }.
"""
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "erased_var_escape"


def test_equation_var_escape_rejected():
    ctx = load(VEC)
    src = """
def bad : all A: *. all n: Nat. Pi v: Vec [A] (succ n). {succ n ~ succ n} =
  /\\A. /\\n. \\v. match v @ \\m. \\w. {succ n ~ m} {
    vnil / e -> delta -e
  | vcons -k x xs / e -> e
  }.
"""
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "erased_var_escape"


def test_termination_rejects_non_structural():
    ctx = load(NAT)
    src = """
def bad : Pi n: Nat. Nat =
  fix f (n) @ \\v. Nat { zero -> zero | succ p -> f (succ p) }.
"""
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "termination"


def test_termination_rejects_self_application():
    ctx = load(NAT)
    src = """
def bad : Pi n: Nat. Nat =
  fix f (n) @ \\v. Nat { zero -> zero | succ p -> f n }.
"""
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "termination"


def test_positivity_rejected():
    ctx = load(NAT)
    src = "data Bad : * = mk : Pi f: Pi x: Bad. Nat. Bad."
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "positivity"
    assert "Bad" not in ctx.datas


def test_positivity_allows_infinitary_branching():
    ctx = load(NAT)
    load("data Tree : * = leaf : Tree | node : Pi f: Pi n: Nat. Tree. Tree.", ctx)


def test_nonuniform_parameter_rejected():
    ctx = load(NAT)
    src = """
data Bad (A : *) : * = mk : Pi x: Bad [Nat]. Bad [A].
"""
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind in ("positivity", "shape")


def test_type_index_must_be_own_variable():
    ctx = load(NAT)
    src = "data Bad : * -> * = mk : Bad [Nat]."
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "shape"


def test_unbound_name():
    ctx = load(NAT)
    with pytest.raises(TypingError) as e:
        load("def u : Nat = wibble.", ctx)
    assert e.value.kind == "unbound_name"


def test_kind_mismatch_in_typedef():
    ctx = load(VEC)
    with pytest.raises(TypingError) as e:
        load("type T : * = Vec.", ctx)
    assert e.value.kind == "kind_mismatch"


def test_polymorphic_identity():
    ctx = load(NAT)
    load("def idf : all X: *. Pi x: X. X = /\\X. \\x. x.", ctx)
    t = parse_term("idf [Nat] two")
    ty = infer(ctx, {}, t)
    assert alpha_eq(ty, TVar("Nat"))


def test_fin_and_dependent_indices():
    ctx = load(NAT)
    src = """
data Fin : Pi n: Nat. * =
  fzero : all n: Nat. Fin (succ n)
| fsucc : all n: Nat. Pi i: Fin n. Fin (succ n).
def f1 : Fin two = fsucc -one (fzero -zero).
def fnone : Pi i: Fin zero. Pi X: Nat. Nat =
  \\i. match i @ \\m. \\w. Pi X: Nat. Nat {
    fzero -n / e -> delta -e
  | fsucc -n j / e -> delta -e
  }.
"""
    load(src, ctx)


CAST_SRC = """
def castNat : Cast [Nat] [Nat] = intrCast -(\\a. a) -(\\a. beta).
type MuNat : * = mu [\\X: *. Nat].
def monoK : all X: *. all Y: *. Cast [X] [Y] => Cast [Nat] [Nat] = /\\X. /\\Y. /\\c. castNat.
def castMu : Cast [MuNat] [MuNat] = intrCast -(\\a: MuNat. a) -(\\a. beta).
def wrap : Nat -> MuNat = in -monoK [MuNat] -castMu.
def unwrap : MuNat -> Nat = out -monoK.
def crush : MuNat -> Nat = ind -monoK [\\v: MuNat. Nat] (/\\R. /\\c. \\rec. \\xs. xs).
"""


def test_cast_and_mu_primitives():
    ctx = load(NAT + CAST_SRC)
    n = ctx.env.normalizer()
    t = parse_term("unwrap (wrap two)")
    got = n.normalize(erase(t))
    assert alpha_eq(got, n.normalize(erase(parse_term("two"))))
    # every coercion introduced above erases to the identity
    for name in ("castNat", "castMu"):
        assert erase(ctx.defs[name][1]) == erase(parse_term("\\x. x"))


def test_cast_requires_nondependent_function():
    ctx = load(VEC)
    src = """
def bad : Cast [Nat] [Nat] = intrCast -(\\a. match a { zero -> zero | succ p -> p }) -(\\a. beta).
"""
    with pytest.raises(TypingError):
        load(src, ctx)


def test_intr_tpeq_and_projections():
    ctx = load(NAT + CAST_SRC)
    src = """
def eqNat : TpEq [Nat] [Nat] = intrTpEq -castNat -castNat.
def useEq : Nat -> Nat = tpEq1 -eqNat.
def useEq2 : Nat -> Nat = tpEq2 -eqNat.
"""
    load(src, ctx)
    assert erase(ctx.defs["useEq"][1]) == erase(parse_term("\\x. x"))


def test_relation_gadt_with_type_index():
    # the shape generated for simulated type functions, in miniature
    ctx = load(NAT)
    src = """
data NaryRel (T : *) : Pi n: Nat. Pi X: *. * =
  nzero : all X: *. TpEq [X] [T] => NaryRel [T] zero [X]
| nsucc : all n: Nat. all Ih: *. Pi p: NaryRel [T] n [Ih]. all X: *.
    TpEq [X] [T -> Ih] => NaryRel [T] (succ n) [X].

def atZero : all X: *. Pi r: NaryRel [Nat] zero [X]. TpEq [X] [Nat] =
  /\\X. \\r. match r @ \\n. \\Y. \\w. TpEq [Y] [Nat] {
    nzero [X1] -q / e ->
      intrTpEq -(intrCast -(tpEq1 -q) -(\\y. beta)) -(intrCast -(tpEq2 -q) -(\\y. beta))
  | nsucc -n1 [Ih] p [X2] -q2 / e2 -> delta -e2
  }.
"""
    load(src, ctx)
    # applied to a canonical proof, the projection computes to the identity
    use = parse_term(
        "atZero [Nat] (nzero [Nat] [Nat] -(intrTpEq -(intrCast -(\\a. a) -(\\a. beta))"
        " -(intrCast -(\\a. a) -(\\a. beta))))")
    ty = infer(ctx, {}, use)
    assert alpha_eq(ty, TTpEq(TVar("Nat"), TVar("Nat")))
    n = ctx.env.normalizer()
    assert alpha_eq(n.normalize(erase(use)), erase(parse_term("\\x. x")))


def test_star_index_equation_enables_rebuild():
    # a match may also name equations for star-kinded indices; rebuilding the
    # constructor at a different final type is how respectfulness proofs go
    ctx = load(NAT)
    load("""
data NaryRel (T : *) : Pi n: Nat. Pi X: *. * =
  nzero : all X: *. TpEq [X] [T] => NaryRel [T] zero [X]
| nsucc : all n: Nat. all Ih: *. Pi p: NaryRel [T] n [Ih]. all X: *.
    TpEq [X] [T -> Ih] => NaryRel [T] (succ n) [X].

def respZero : all X1: *. Pi r: NaryRel [Nat] zero [X1].
               all X2: *. TpEq [X1] [X2] => NaryRel [Nat] zero [X2] =
  /\\X1. \\r. /\\X2. /\\q. match r @ \\n. \\Y. \\w. NaryRel [Nat] n [X2] {
    nzero [Y1] -e1 / en eX ->
      nzero [Nat] [X2]
        -(intrTpEq
           -(intrCast -(\\v. tpEq1 -e1 (tpEq1 -eX (tpEq2 -q v))) -(\\v. beta))
           -(intrCast -(\\v. tpEq1 -q (tpEq2 -eX (tpEq2 -e1 v))) -(\\v. beta)))
  | nsucc -n1 [Ih] p [X3] -q2 / en2 -> delta -en2
  }.
""", ctx)
    assert "respZero" in ctx.defs


def test_family_index_equation_is_pointwise():
    ctx = load(NAT)
    load("""
data FamRel : Pi n: Nat. Pi L: (Pi i: Nat. *). Pi X: *. * =
  famz : all L: (Pi i: Nat. *). all X: *. TpEq [X] [L zero] => FamRel zero [L] [X].

def famHead : all L0: (Pi i: Nat. *). all X1: *. Pi r: FamRel zero [L0] [X1].
              TpEq [X1] [L0 zero] =
  /\\L0. /\\X1. \\r. match r @ \\n. \\L. \\Y. \\w. TpEq [X1] [L0 zero] {
    famz [L1] [Y1] -q / en eL eX ->
      intrTpEq
        -(intrCast -(\\v. tpEq2 -(eL zero zero beta) (tpEq1 -q (tpEq1 -eX v)))
                   -(\\v. beta))
        -(intrCast -(\\v. tpEq2 -eX (tpEq2 -q (tpEq1 -(eL zero zero beta) v)))
                   -(\\v. beta))
  }.
""", ctx)
    assert "famHead" in ctx.defs


def test_equation_unsupported_for_rich_index_kind():
    ctx = load(NAT)
    with pytest.raises(TypingError) as e:
        load("""
data Deep : Pi L: (Pi i: Nat. Pi j: Nat. *). * =
  mkDeep : all L: (Pi i: Nat. Pi j: Nat. *). Deep [L].

def bad : all L: (Pi i: Nat. Pi j: Nat. *). Pi r: Deep [L]. Nat =
  /\\L. \\r. match r @ \\M. \\w. Nat { mkDeep [L1] / eL -> zero }.
""", ctx)
    assert e.value.kind == "shape"


def test_termination_through_premise_function():
    # recursion may pass through a function-typed pattern component whose
    # result is the datatype: calling it yields subterms
    ctx = load(NAT)
    load("""
data Tree : * = leaf : Tree | node : Pi f: (Pi n: Nat. Tree). Tree.

def depth : Pi t: Tree. Nat =
  fix d (t) @ \\v. Nat {
    leaf -> zero
  | node f -> succ (d (f zero))
  }.
""", ctx)
    assert "depth" in ctx.defs


def test_builtin_requires_witness():
    ctx = load(NAT + CAST_SRC)
    with pytest.raises(TypingError):
        load("def bad : MuNat -> Nat = out.", ctx)


def test_mu_witness_shape_checked():
    ctx = load(NAT)
    src = """
def notMono : Nat = zero.
def bad : Nat -> Nat = out -notMono.
"""
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "shape"


def test_name_clash_rejected():
    ctx = load(NAT)
    with pytest.raises(TypingError) as e:
        load("def zero : Nat = zero.", ctx)
    assert e.value.kind == "name_clash"


def test_fix_motive_mismatch_rejected():
    ctx = load(NAT)
    src = """
def bad : Pi a: Nat. Nat =
  fix f (a) @ \\v. Pi b: Nat. Nat { zero -> \\b. b | succ p -> \\b. b }.
"""
    with pytest.raises(TypingError) as e:
        load(src, ctx)
    assert e.value.kind == "conversion_mismatch"
