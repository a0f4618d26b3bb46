"""The bundled prelude loads, computes, and all its coercions erase to nothing."""

from hypothesis import given, settings
import hypothesis.strategies as st

from lesim.core import alpha_eq, erase
from lesim.kernel import check, infer
from lesim.prelude import CONGRUENCES, standard_context
from lesim.surface import parse_term, parse_type

CTX = standard_context()


def norm(src):
    t = parse_term(src)
    infer(CTX, {}, t)
    return CTX.env.normalizer().normalize(erase(t))


def test_prelude_loads_expected_names():
    for name in ["explode", "eqSym", "eqTrans", "castRefl", "castTrans",
                 "tpEqRefl", "tpEqSym", "tpEqTrans", "tpEqIrrel", "famTpEq",
                 "arrowTpEq", "pairTpEq", "sumTpEq", "sigTpEq", "vecTpEq",
                 "castPair", "castSig", "fvnil", "fvcons", "sigFst", "sigSnd"]:
        assert name in CTX.defs
    for name in ["False", "Unit", "Bool", "Nat", "Pair", "Sum", "Sigma", "Fin", "Vec"]:
        assert name in CTX.datas
    for name in ["Monotonic", "RespTpEq1", "RespTpEq2"]:
        assert name in CTX.typedefs


def test_congruence_rules_point_at_real_lemmas():
    for head, rule in CONGRUENCES.items():
        if head != "->":
            assert head in CTX.datas
        assert rule.lemma in CTX.defs
        assert all(p in ("eq", "pointwise", "term") for p in rule.positions)


def test_plus_computes():
    assert alpha_eq(norm("plus two two"), norm("four"))


def test_fin_function_lookup():
    f2 = "fvcons [Nat] -one one (fvcons [Nat] -zero two (fvnil [Nat]))"
    assert alpha_eq(norm(f2 + " (fz -one)"), norm("one"))
    assert alpha_eq(norm(f2 + " (fs -one (fz -zero))"), norm("two"))


PAIR = "mkPair [Nat] [Bool] two true"


def test_pair_retag_is_identity():
    t = (f"pairRetag [Nat] [Bool] [Nat] [Bool] -(tpEqRefl [Nat]) -(tpEqRefl [Bool]) ({PAIR})")
    assert alpha_eq(norm(t), norm(PAIR))


def test_cast_pair_is_identity():
    t = (f"cast -(castPair [Nat] [Bool] [Nat] [Bool] -(castRefl [Nat]) -(castRefl [Bool])) ({PAIR})")
    assert alpha_eq(norm(t), norm(PAIR))


def test_tpeq_coercion_is_identity():
    t = ("tpEq1 -(sumTpEq [Nat] [Nat] -(tpEqRefl [Nat]) [Bool] [Bool] -(tpEqRefl [Bool])) "
         "(in1 [Nat] [Bool] two)")
    assert alpha_eq(norm(t), norm("in1 [Nat] [Bool] two"))


def vec_literal(n):
    v, ln = "(vnil [Nat])", "zero"
    for _ in range(n):
        v = f"(vcons [Nat] -{ln} one {v})"
        ln = f"(succ {ln})"
    return v, ln


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 6))
def test_vec_retag_rebuilds_the_same_vector(n):
    v, ln = vec_literal(n)
    t = (f"sigFst [Vec [Nat] {ln}] [\\u: Vec [Nat] {ln}. {{u ~ {v}}}] "
         f"(vecRetag [Nat] [Nat] -(tpEqRefl [Nat]) -{ln} {v})")
    assert alpha_eq(norm(t), norm(v))


def test_cast_via_composes_to_identity():
    t = ("cast -(castVia [Nat] [Nat] [Nat] [Nat] -(tpEqRefl [Nat]) "
         "-(castRefl [Nat]) -(tpEqRefl [Nat])) two")
    assert alpha_eq(norm(t), norm("two"))


def test_sig_lemma_is_heterogeneous_and_erases():
    # first components merely equal, family premise pointwise on both sides
    t = ("tpEq1 -(sigTpEq [Nat] [Nat] -(tpEqRefl [Nat]) "
         "[\\x: Nat. Bool] [\\x: Nat. Bool] "
         "-(\\x1: Nat. \\x2: Nat. \\q: {x1 ~ x2}. tpEqRefl [Bool])) "
         "(mkSig [Nat] [\\x: Nat. Bool] two true)")
    assert alpha_eq(norm(t), norm("mkSig [Nat] [\\x: Nat. Bool] two true"))


def test_arrow_lemma_proves_binary_respect_condition():
    # the shape the elaborator emits for laws conditioned on an opaque
    # binary type operation
    ty = parse_type("RespTpEq2 [\\A: *. \\B: *. A -> B]")
    check(CTX, {}, parse_term("arrowTpEq"), ty)
