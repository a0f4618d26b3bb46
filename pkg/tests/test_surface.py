"""Parser and printer round trips."""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from lesim.core import (
    App, AppI, AppT, Beta, Builtin, Lam, LamI, Match, Phi, TAll, TAppT,
    TAppTm, TEq, TMu, TPi, TVar, Var, alpha_eq,
)
from lesim.surface import (
    DataDecl, DefDecl, ParseError, Parser, TypefunDecl, lex, parse_program,
    parse_term, parse_type, pp_program, pp_term, pp_type, program_alpha_eq,
)

SAMPLES = [
    "def idf : Pi X: Nat. Nat = \\x. x.",
    "def k : all X: *. X -> Nat -> X = /\\X: *. \\x: X. \\y: Nat. x.",
    "def e : all p: {a ~ b}. Nat = /\\p. zero.",
    "def r : {f a ~ g b} => Nat = \\q. q.",
    "data Nat : * = zero : Nat | succ : Nat -> Nat.",
    "data False : *.",
    "data Vec (A : *) : Pi n: Nat. * = vnil : Vec [A] zero"
    " | vcons : all m: Nat. A -> Vec [A] m -> Vec [A] (succ m).",
    "type Id : Pi X: *. * = \\X: *. X.",
    "type Arr : * -> * -> * = \\X: *. \\Y: *. X -> Y.",
    "def d : Nat = delta -(p q).",
    "def ph : T = phi (e x) - (f y) {g z}.",
    "def rh : {b ~ a} = rho e @ v. {v ~ a} - beta.",
    "def cst : S -> T = cast -(c x).",
    "def ic : Nat = intrCast -f -(p x).",
    "def it : Nat = intrTpEq -c1 -c2.",
    "def t1 : S -> T = tpEq1 -(e x).",
    "def m : Nat = match xs @ \\n. \\v. Nary [T] n -> T"
    " { vnil / e -> x | vcons -m h t / e -> f h t }.",
    "def m2 : Nat = match p { }.",
    "def m3 : Nat = match p { mk [X] -q y -> y }.",
    "def fx : Pi n: Nat. Nat = fix go (n) @ \\v. Nat"
    " { zero -> zero | succ p -> succ (go p) }.",
    "def mi : mu [F] = in -mono [mu [F]] -(castRefl [mu [F]]) xs.",
    "def mo : F [mu [F]] = out -mono t.",
    "def vr : Nat = ind -mono [P] alg x.",
    "typefun Nary (T : *) : Pi n: Nat. *"
    " { Nary zero = T ; Nary (succ m) = T -> Nary [T] m }.",
    "typefun IfDec (A : *) : Pi b: Bool. * -> *"
    " { IfDec true = \\X: *. A ; IfDec false = \\X: *. X }.",
    "algfold NaryFold NatF natFMono NaryAlg naryAlgResp.",
    "def cz : Cast [A] [B] = c.",
    "def tz : TpEq [A] [B] = c.",
    "def eqt : {x ~ y} -> Nat = \\q. zero.",
    "def u : mu [\\X: *. Sum [Unit] [X]] = t.",
]


@pytest.mark.parametrize("src", SAMPLES, ids=range(len(SAMPLES)))
def test_roundtrip(src):
    p1 = parse_program(src)
    printed = pp_program(p1)
    p2 = parse_program(printed)
    assert program_alpha_eq(p1, p2), printed


def test_whole_corpus_roundtrips_together():
    src = "\n".join(SAMPLES)
    p1 = parse_program(src)
    assert program_alpha_eq(parse_program(pp_program(p1)), p1)


def test_comments_and_primes():
    src = "-- a comment\ndef x' : Nat = y'. -- trailing\n"
    (d,) = parse_program(src)
    assert d.name == "x'"
    assert d.body == Var("y'")


def test_parse_shapes():
    t = parse_term("f -a [T] b")
    assert t == App(AppT(AppI(Var("f"), Var("a")), TVar("T")), Var("b"))
    ty = parse_type("Vec [A] (succ n)")
    assert ty == TAppTm(TAppT(TVar("Vec"), TVar("A")), App(Var("succ"), Var("n")))
    assert parse_type("A -> B => C") == TPi("_", TVar("A"), TAll("_", TVar("B"), TVar("C")))
    assert parse_type("mu [F]") == TMu(TVar("F"))
    assert parse_term("in -m t") == App(AppI(Builtin("in"), Var("m")), Var("t"))


def test_match_in_type_position_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_program("type Bad : * = match x { }.")
    with pytest.raises(ParseError):
        parse_program("def f : (match x { }) -> Nat = g.")
    with pytest.raises(ParseError):
        parse_program("typefun G (T : *) : Pi n: Nat. * { G zero = match n { } }.")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_program("def x :\n= y.")
    assert e.value.line == 2


def test_keyword_cannot_be_a_name():
    with pytest.raises(ParseError):
        parse_program("def match : Nat = x.")


def test_kind_type_confusion_rejected():
    with pytest.raises(ParseError):
        parse_program("def x : * = y.")
    with pytest.raises(ParseError):
        parse_program("type T : Nat = U.")
    with pytest.raises(ParseError):
        parse_program("def x : Pi X: *. X = y.")  # type-over-types needs 'all'


NAMES = st.sampled_from(list("abcfxyz"))


def printable_terms():
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


@settings(max_examples=150, deadline=None)
@given(printable_terms())
def test_pp_parse_roundtrip_terms(t):
    assert alpha_eq(parse_term(pp_term(t)), t)


def test_lex_rejects_stray_characters():
    with pytest.raises(ParseError):
        lex("def x # y")
