"""Concrete syntax: lexer, parser and printer for `.les` files.

The grammar is unambiguous by construction: type arguments are always
bracketed (`Vec [A] n`), erased term arguments are dashed (`f -x`), and a
declaration ends with a period.  The parser builds core trees directly;
only the declaration heads keep any surface-specific structure.

Terms:      \\x:T. t   /\\X:*. t   f a   f -a   f [T]   beta   delta -p
            phi q - t {t'}   rho q @ x. T - t   cast -c   intrCast -f -p
            tpEq1 -e   tpEq2 -e   intrTpEq -a -b   in   out   ind
            match t @ \\i. \\v. T { c x -y [X] / e -> body | ... }
            fix f (x) @ \\i. \\v. T { ... }
Types:      *-kinded atoms, Pi x: T. U, all x: K. U, T -> U, T => U,
            {t ~ t'}, \\x: K. T, F [T], F t, mu [F], Cast [S] [T],
            TpEq [S] [T]
Decls:      def n : T = t.    type N : K = T.
            data D (p : C) ... : K = c : T | ... .
            typefun G (p : C) ... : K { G (c x -y) = T ; ... }.
            algfold Name F mono Alg algResp.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    App, AppI, AppT, Beta, Branch, BranchVar, Builtin, CastElim, CoreTerm,
    CoreType, Delta, Fix, IntrCast, IntrTpEq, KPi, KStar, Kind, Lam, LamI,
    Match, Motive, Phi, Rho, TAll, TAppT, TAppTm, TCast, TEq, TLam, TMu,
    TPi, TTpEq, TpEq1, TpEq2, TVar, Var, alpha_eq, free_names,
)

KEYWORDS = {
    "data", "def", "type", "typefun", "algfold", "match", "fix", "all",
    "Pi", "mu", "beta", "delta", "phi", "rho", "cast", "intrCast",
    "intrTpEq", "tpEq1", "tpEq2", "Cast", "TpEq", "in", "out", "ind",
}

PUNCT = ["->", "=>", "/\\", "(", ")", "[", "]", "{", "}", ".", ";", ":",
         "=", "|", "@", "~", "\\", "-", "/", "*"]


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "punct" | "eof"
    text: str
    line: int
    col: int


def lex(src: str):
    toks = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            toks.append(Token("ident", src[i:j], line, col))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if src.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"stray character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# declarations


@dataclass(frozen=True)
class DefDecl:
    name: str
    ty: CoreType
    body: CoreTerm


@dataclass(frozen=True)
class TypeDecl:
    name: str
    kind: Kind
    body: CoreType


@dataclass(frozen=True)
class DataDecl:
    name: str
    params: tuple  # ((name, CoreType|Kind), ...)
    kind: Kind  # kind of the index telescope
    ctors: tuple  # ((name, CoreType), ...)


@dataclass(frozen=True)
class Clause:
    ctor: str
    binders: tuple  # tuple[BranchVar, ...]
    rhs: CoreType


@dataclass(frozen=True)
class TypefunDecl:
    name: str
    params: tuple
    kind: Kind
    clauses: tuple


@dataclass(frozen=True)
class AlgfoldDecl:
    name: str
    scheme: str
    mono: str
    alg: str
    algresp: str


Decl = Union[DefDecl, TypeDecl, DataDecl, TypefunDecl, AlgfoldDecl]


class Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    # ----- token plumbing

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind in ("punct", "ident")

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            raise ParseError(f"expected a name, found {t.text!r}", t.line, t.col)
        return self.next().text

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # ----- programs

    def parse_program(self):
        decls = []
        while self.peek().kind != "eof":
            decls.append(self.parse_decl())
        return tuple(decls)

    def parse_decl(self) -> Decl:
        if self.eat("def"):
            name = self.ident()
            self.expect(":")
            ty = self.parse_type()
            self.expect("=")
            body = self.parse_term()
            self.expect(".")
            return DefDecl(name, ty, body)
        if self.eat("type"):
            name = self.ident()
            self.expect(":")
            kind = self.parse_kind()
            self.expect("=")
            body = self.parse_type()
            self.expect(".")
            return TypeDecl(name, kind, body)
        if self.eat("data"):
            name = self.ident()
            params = self.parse_params()
            self.expect(":")
            kind = self.parse_kind()
            ctors = []
            if self.eat("="):
                while not self.at("."):
                    cname = self.ident()
                    self.expect(":")
                    cty = self.parse_type()
                    ctors.append((cname, cty))
                    if not self.eat("|"):
                        break
            self.expect(".")
            return DataDecl(name, tuple(params), kind, tuple(ctors))
        if self.eat("typefun"):
            name = self.ident()
            params = self.parse_params()
            self.expect(":")
            kind = self.parse_kind()
            self.expect("{")
            clauses = []
            while not self.at("}"):
                head = self.ident()
                if head != name:
                    self.fail(f"clause head {head!r} does not match typefun {name!r}")
                clauses.append(self.parse_clause())
                if not self.eat(";"):
                    break
            self.expect("}")
            self.expect(".")
            return TypefunDecl(name, tuple(params), kind, tuple(clauses))
        if self.eat("algfold"):
            name = self.ident()
            scheme = self.ident()
            mono = self.ident()
            alg = self.ident()
            algresp = self.ident()
            self.expect(".")
            return AlgfoldDecl(name, scheme, mono, alg, algresp)
        self.fail("expected a declaration (def, type, data, typefun, algfold)")

    def parse_params(self):
        params = []
        while self.at("("):
            self.next()
            pname = self.ident()
            self.expect(":")
            cls = self.parse_classifier()
            self.expect(")")
            params.append((pname, cls))
        return params

    def parse_clause(self) -> Clause:
        if self.at("("):
            self.next()
            ctor = self.ident()
            binders = self.parse_bindspecs()
            self.expect(")")
        else:
            ctor = self.ident()
            binders = ()
        self.expect("=")
        rhs = self.parse_type()
        return Clause(ctor, tuple(binders), rhs)

    def parse_bindspecs(self):
        out = []
        while True:
            if self.eat("-"):
                out.append(BranchVar(self.ident(), "erased"))
            elif self.at("["):
                self.next()
                out.append(BranchVar(self.ident(), "type"))
                self.expect("]")
            elif self.peek().kind == "ident" and self.peek().text not in KEYWORDS:
                out.append(BranchVar(self.ident(), "term"))
            else:
                return out

    # ----- classifiers (types and kinds share one grammar)

    def parse_classifier(self):
        if self.eat("Pi"):
            x = self.ident()
            self.expect(":")
            dom = self.parse_classifier()
            self.expect(".")
            cod = self.parse_classifier()
            if isinstance(cod, (KStar, KPi)):
                return KPi(x, dom, cod)
            if isinstance(dom, (KStar, KPi)):
                self.fail("a type quantifier over types must use 'all'")
            return TPi(x, dom, cod)
        if self.eat("all"):
            x = self.ident()
            self.expect(":")
            dom = self.parse_classifier()
            self.expect(".")
            cod = self.parse_type()
            return TAll(x, dom, cod)
        if self.eat("\\"):
            x = self.ident()
            self.expect(":")
            dom = self.parse_classifier()
            self.expect(".")
            body = self.parse_type()
            return TLam(x, dom, body)
        lhs = self.parse_classifier_app()
        if self.eat("->"):
            rhs = self.parse_classifier()
            if isinstance(rhs, (KStar, KPi)):
                return KPi("_", lhs, rhs)
            if isinstance(lhs, (KStar, KPi)):
                self.fail("a kind can only be the domain of another kind")
            return TPi("_", lhs, rhs)
        if self.eat("=>"):
            rhs = self.parse_type()
            if isinstance(lhs, (KStar, KPi)):
                self.fail("'=>' quantifies over erased terms, not types")
            return TAll("_", lhs, rhs)
        return lhs

    def parse_classifier_app(self):
        head = self.parse_classifier_atom()
        while True:
            if self.at("["):
                if isinstance(head, (KStar, KPi)):
                    self.fail("kinds cannot be applied")
                self.next()
                arg = self.parse_type()
                self.expect("]")
                head = TAppT(head, arg)
            elif self.peek().kind == "ident" and self.peek().text not in KEYWORDS:
                head = TAppTm(head, Var(self.ident()))
            elif self.at("("):
                # a parenthesized juxtaposed argument is always a term
                if isinstance(head, (KStar, KPi)):
                    self.fail("kinds cannot be applied")
                self.next()
                arg = self.parse_term()
                self.expect(")")
                head = TAppTm(head, arg)
            else:
                return head

    def parse_classifier_atom(self):
        t = self.peek()
        if self.eat("*"):
            return KStar()
        if self.eat("("):
            inner = self.parse_classifier()
            self.expect(")")
            return inner
        if self.eat("{"):
            lhs = self.parse_term()
            self.expect("~")
            rhs = self.parse_term()
            self.expect("}")
            return TEq(lhs, rhs)
        if self.eat("mu"):
            self.expect("[")
            fam = self.parse_type()
            self.expect("]")
            return TMu(fam)
        if self.eat("Cast"):
            return TCast(*self._two_brackets())
        if self.eat("TpEq"):
            return TTpEq(*self._two_brackets())
        if t.kind == "ident" and t.text not in KEYWORDS:
            return TVar(self.next().text)
        self.fail(f"expected a type or kind, found {t.text!r}")

    def _two_brackets(self):
        self.expect("[")
        a = self.parse_type()
        self.expect("]")
        self.expect("[")
        b = self.parse_type()
        self.expect("]")
        return a, b

    def parse_type(self) -> CoreType:
        t = self.peek()
        cls = self.parse_classifier()
        if isinstance(cls, (KStar, KPi)):
            raise ParseError("expected a type, found a kind", t.line, t.col)
        return cls

    def parse_kind(self) -> Kind:
        t = self.peek()
        cls = self.parse_classifier()
        if not isinstance(cls, (KStar, KPi)):
            raise ParseError("expected a kind, found a type", t.line, t.col)
        return cls

    # ----- terms

    def parse_term(self) -> CoreTerm:
        if self.eat("\\"):
            x = self.ident()
            ann = None
            if self.eat(":"):
                ann = self.parse_type()
            self.expect(".")
            return Lam(x, ann, self.parse_term())
        if self.eat("/\\"):
            x = self.ident()
            ann = None
            if self.eat(":"):
                ann = self.parse_classifier()
            self.expect(".")
            return LamI(x, ann, self.parse_term())
        return self.parse_app()

    def parse_app(self) -> CoreTerm:
        head = self.parse_prefix()
        while True:
            if self.eat("-"):
                head = AppI(head, self.parse_atom())
            elif self.at("["):
                self.next()
                ty = self.parse_type()
                self.expect("]")
                head = AppT(head, ty)
            elif self._at_atom():
                head = App(head, self.parse_atom())
            else:
                return head

    def _at_atom(self) -> bool:
        t = self.peek()
        if t.kind == "ident":
            return t.text not in KEYWORDS or t.text in ("beta", "in", "out", "ind")
        return t.text == "("

    def parse_prefix(self) -> CoreTerm:
        if self.eat("delta"):
            self.expect("-")
            return Delta(self.parse_atom())
        if self.eat("phi"):
            q = self.parse_atom()
            self.expect("-")
            main = self.parse_atom()
            self.expect("{")
            shadow = self.parse_term()
            self.expect("}")
            return Phi(q, main, shadow)
        if self.eat("rho"):
            q = self.parse_atom()
            self.expect("@")
            x = self.ident()
            self.expect(".")
            motive = self.parse_type()
            self.expect("-")
            body = self.parse_atom()
            return Rho(q, x, motive, body)
        if self.eat("cast"):
            self.expect("-")
            return CastElim(self.parse_atom())
        if self.eat("intrCast"):
            self.expect("-")
            f = self.parse_atom()
            self.expect("-")
            p = self.parse_atom()
            return IntrCast(f, p)
        if self.eat("intrTpEq"):
            self.expect("-")
            a = self.parse_atom()
            self.expect("-")
            b = self.parse_atom()
            return IntrTpEq(a, b)
        if self.eat("tpEq1"):
            self.expect("-")
            return TpEq1(self.parse_atom())
        if self.eat("tpEq2"):
            self.expect("-")
            return TpEq2(self.parse_atom())
        if self.eat("match"):
            scrut = self.parse_app()
            motive = None
            if self.eat("@"):
                motive = self.parse_motive()
            self.expect("{")
            branches = self.parse_branches()
            self.expect("}")
            return Match(scrut, motive, branches)
        if self.eat("fix"):
            fn = self.ident()
            self.expect("(")
            var = self.ident()
            self.expect(")")
            self.expect("@")
            motive = self.parse_motive()
            self.expect("{")
            branches = self.parse_branches()
            self.expect("}")
            return Fix(fn, var, motive, branches)
        return self.parse_atom()

    def parse_motive(self) -> Motive:
        names = []
        while self.eat("\\"):
            names.append(self.ident())
            if self.eat(":"):
                self.parse_classifier()  # annotations are recomputed anyway
            self.expect(".")
        if not names:
            self.fail("a motive needs at least the scrutinee binder")
        body = self.parse_type()
        return Motive(tuple(names[:-1]), names[-1], body)

    def parse_branches(self):
        branches = []
        self.eat("|")
        while not self.at("}"):
            ctor = self.ident()
            bvars = self.parse_bindspecs()
            eqs = []
            if self.eat("/"):
                while self.peek().kind == "ident" and not self.at("->"):
                    eqs.append(self.ident())
            self.expect("->")
            body = self.parse_term()
            branches.append(Branch(ctor, tuple(bvars), tuple(eqs), body))
            if not self.eat("|"):
                break
        return tuple(branches)

    def parse_atom(self) -> CoreTerm:
        t = self.peek()
        if self.eat("beta"):
            return Beta()
        if t.kind == "ident" and t.text in ("in", "out", "ind"):
            self.next()
            return Builtin(t.text)
        if self.eat("("):
            inner = self.parse_term()
            self.expect(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            return Var(self.next().text)
        self.fail(f"expected a term, found {t.text!r}")


def parse_program(src: str):
    return Parser(lex(src)).parse_program()


def parse_term(src: str) -> CoreTerm:
    p = Parser(lex(src))
    t = p.parse_term()
    if p.peek().kind != "eof":
        p.fail("trailing input after term")
    return t


def parse_type(src: str) -> CoreType:
    p = Parser(lex(src))
    t = p.parse_type()
    if p.peek().kind != "eof":
        p.fail("trailing input after type")
    return t


# ---------------------------------------------------------------------------
# printing

def _is_kind(x) -> bool:
    return isinstance(x, (KStar, KPi))


def pp_term(t: CoreTerm, prec: int = 0) -> str:
    match t:
        case Var(x):
            return x
        case Beta():
            return "beta"
        case Builtin(name):
            return name
        case Lam(x, ann, body):
            s = f"\\{x}. {pp_term(body)}" if ann is None else \
                f"\\{x}: {pp_type(ann)}. {pp_term(body)}"
            return _wrap(s, prec > 0)
        case LamI(x, ann, body):
            s = f"/\\{x}. {pp_term(body)}" if ann is None else \
                f"/\\{x}: {pp_classifier(ann)}. {pp_term(body)}"
            return _wrap(s, prec > 0)
        case App(fn, arg):
            return _wrap(f"{pp_term(fn, 1)} {pp_term(arg, 2)}", prec > 1)
        case AppI(fn, arg):
            return _wrap(f"{pp_term(fn, 1)} -{pp_term(arg, 2)}", prec > 1)
        case AppT(fn, ty):
            return _wrap(f"{pp_term(fn, 1)} [{pp_type(ty)}]", prec > 1)
        case Delta(p):
            return _wrap(f"delta -{pp_term(p, 2)}", prec > 1)
        case Phi(q, main, shadow):
            return _wrap(f"phi {pp_term(q, 2)} - {pp_term(main, 2)} {{{pp_term(shadow)}}}", prec > 1)
        case Rho(q, x, motive, body):
            return _wrap(f"rho {pp_term(q, 2)} @ {x}. {pp_type(motive)} - {pp_term(body, 2)}", prec > 1)
        case CastElim(c):
            return _wrap(f"cast -{pp_term(c, 2)}", prec > 1)
        case IntrCast(f, p):
            return _wrap(f"intrCast -{pp_term(f, 2)} -{pp_term(p, 2)}", prec > 1)
        case IntrTpEq(a, b):
            return _wrap(f"intrTpEq -{pp_term(a, 2)} -{pp_term(b, 2)}", prec > 1)
        case TpEq1(e):
            return _wrap(f"tpEq1 -{pp_term(e, 2)}", prec > 1)
        case TpEq2(e):
            return _wrap(f"tpEq2 -{pp_term(e, 2)}", prec > 1)
        case Match(scrut, motive, branches):
            mot = f" @ {pp_motive(motive)}" if motive is not None else ""
            brs = " | ".join(pp_branch(b) for b in branches)
            return _wrap(f"match {pp_term(scrut, 1)}{mot} {{ {brs} }}", prec > 1)
        case Fix(fn, var, motive, branches):
            brs = " | ".join(pp_branch(b) for b in branches)
            return _wrap(f"fix {fn} ({var}) @ {pp_motive(motive)} {{ {brs} }}", prec > 1)
    raise TypeError(f"pp_term: {t!r}")


def pp_motive(m: Motive) -> str:
    binders = "".join(f"\\{v}. " for v in m.ivars + (m.svar,))
    return binders + pp_type(m.body)


def pp_branch(b: Branch) -> str:
    parts = [b.ctor]
    for v in b.vars:
        match v.marker:
            case "term":
                parts.append(v.name)
            case "erased":
                parts.append(f"-{v.name}")
            case "type":
                parts.append(f"[{v.name}]")
    if b.eqs:
        parts.append("/")
        parts.extend(b.eqs)
    return f"{' '.join(parts)} -> {pp_term(b.body)}"


def _wrap(s: str, need: bool) -> str:
    return f"({s})" if need else s


def pp_type(ty: CoreType, prec: int = 0) -> str:
    match ty:
        case TVar(x):
            return x
        case TPi("_", dom, cod) if "_" not in free_names(cod):
            return _wrap(f"{pp_type(dom, 1)} -> {pp_type(cod)}", prec > 0)
        case TPi(x, dom, cod):
            return _wrap(f"Pi {x}: {pp_type(dom)}. {pp_type(cod)}", prec > 0)
        case TAll("_", dom, cod) if not _is_kind(dom) and "_" not in free_names(cod):
            return _wrap(f"{pp_type(dom, 1)} => {pp_type(cod)}", prec > 0)
        case TAll(x, dom, cod):
            return _wrap(f"all {x}: {pp_classifier(dom)}. {pp_type(cod)}", prec > 0)
        case TLam(x, dom, body):
            return _wrap(f"\\{x}: {pp_classifier(dom)}. {pp_type(body)}", prec > 0)
        case TAppT(fn, arg):
            return _wrap(f"{pp_type(fn, 1)} [{pp_type(arg)}]", prec > 1)
        case TAppTm(fn, arg):
            return _wrap(f"{pp_type(fn, 1)} {pp_term(arg, 2)}", prec > 1)
        case TEq(lhs, rhs):
            return f"{{{pp_term(lhs)} ~ {pp_term(rhs)}}}"
        case TCast(s, d):
            return _wrap(f"Cast [{pp_type(s)}] [{pp_type(d)}]", prec > 1)
        case TTpEq(s, d):
            return _wrap(f"TpEq [{pp_type(s)}] [{pp_type(d)}]", prec > 1)
        case TMu(fam):
            return _wrap(f"mu [{pp_type(fam)}]", prec > 1)
    raise TypeError(f"pp_type: {ty!r}")


def pp_kind(k: Kind, prec: int = 0) -> str:
    match k:
        case KStar():
            return "*"
        case KPi("_", dom, cod) if "_" not in free_names(cod):
            return _wrap(f"{pp_classifier(dom, 1)} -> {pp_kind(cod)}", prec > 0)
        case KPi(x, dom, cod):
            return _wrap(f"Pi {x}: {pp_classifier(dom)}. {pp_kind(cod)}", prec > 0)
    raise TypeError(f"pp_kind: {k!r}")


def pp_classifier(c, prec: int = 0) -> str:
    return pp_kind(c, prec) if _is_kind(c) else pp_type(c, prec)


def pp_decl(d: Decl) -> str:
    match d:
        case DefDecl(name, ty, body):
            return f"def {name} : {pp_type(ty)} = {pp_term(body)}."
        case TypeDecl(name, kind, body):
            return f"type {name} : {pp_kind(kind)} = {pp_type(body)}."
        case DataDecl(name, params, kind, ctors):
            ps = "".join(f" ({p} : {pp_classifier(c)})" for p, c in params)
            if not ctors:
                return f"data {name}{ps} : {pp_kind(kind)}."
            cs = " | ".join(f"{c} : {pp_type(t)}" for c, t in ctors)
            return f"data {name}{ps} : {pp_kind(kind)} = {cs}."
        case TypefunDecl(name, params, kind, clauses):
            ps = "".join(f" ({p} : {pp_classifier(c)})" for p, c in params)
            cl = " ; ".join(
                f"{name} {_pp_pattern(c)} = {pp_type(c.rhs)}" for c in clauses)
            return f"typefun {name}{ps} : {pp_kind(kind)} {{ {cl} }}."
        case AlgfoldDecl(name, scheme, mono, alg, algresp):
            return f"algfold {name} {scheme} {mono} {alg} {algresp}."
    raise TypeError(f"pp_decl: {d!r}")


def _pp_pattern(c: Clause) -> str:
    if not c.binders:
        return c.ctor
    bits = [c.ctor]
    for v in c.binders:
        match v.marker:
            case "term":
                bits.append(v.name)
            case "erased":
                bits.append(f"-{v.name}")
            case "type":
                bits.append(f"[{v.name}]")
    return f"({' '.join(bits)})"


def pp_program(decls) -> str:
    return "\n".join(pp_decl(d) for d in decls) + "\n"


# ---------------------------------------------------------------------------
# declaration-level alpha comparison (used for emitted-core matching)

def decl_alpha_eq(a: Decl, b: Decl) -> bool:
    if type(a) is not type(b):
        return False
    match a, b:
        case DefDecl(n1, t1, b1), DefDecl(n2, t2, b2):
            return n1 == n2 and alpha_eq(t1, t2) and alpha_eq(b1, b2)
        case TypeDecl(n1, k1, b1), TypeDecl(n2, k2, b2):
            return n1 == n2 and alpha_eq(k1, k2) and alpha_eq(b1, b2)
        case DataDecl(n1, p1, k1, c1), DataDecl(n2, p2, k2, c2):
            if n1 != n2 or len(p1) != len(p2) or len(c1) != len(c2):
                return False
            if [p for p, _ in p1] != [p for p, _ in p2]:
                return False
            if not all(alpha_eq(x, y) for (_, x), (_, y) in zip(p1, p2)):
                return False
            if not alpha_eq(k1, k2):
                return False
            return all(m == n and alpha_eq(x, y) for (m, x), (n, y) in zip(c1, c2))
        case TypefunDecl(n1, p1, k1, c1), TypefunDecl(n2, p2, k2, c2):
            if n1 != n2 or len(p1) != len(p2) or len(c1) != len(c2):
                return False
            if [p for p, _ in p1] != [p for p, _ in p2]:
                return False
            if not all(alpha_eq(x, y) for (_, x), (_, y) in zip(p1, p2)):
                return False
            if not alpha_eq(k1, k2):
                return False
            return all(
                x.ctor == y.ctor and x.binders == y.binders and alpha_eq(x.rhs, y.rhs)
                for x, y in zip(c1, c2))
        case AlgfoldDecl(), AlgfoldDecl():
            return a == b
    return False


def program_alpha_eq(xs, ys) -> bool:
    return len(xs) == len(ys) and all(decl_alpha_eq(x, y) for x, y in zip(xs, ys))
