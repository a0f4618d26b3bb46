"""The type checker.

Typing is bidirectional over annotated core terms; definitional equality is
delegated to `conversion` (erasures compared up to beta-eta).  The erased
fragment is never typed: erased binders are admitted exactly when the bound
name does not survive into the body's erasure, checked at each binder.

Datatypes support term and type indices.  A match may refine: each branch
binds the constructor telescope plus an optional equation name per index
(a prefix, in declaration order) relating the scrutinee's indices to the
constructor's.  Term indices yield untyped equalities; star-kinded type
indices yield extensional type equalities; single-argument type families
yield a pointwise form.  These are sound because a constructor's type
indices are always its own quantified variables, so the instantiation at
which the scrutinee was built is convertible with the scrutinee's index.
Recursive functions (`fix`) quantify their datatype's indices invisibly,
match their one relevant argument immediately, and are checked for
structural descent; datatype declarations are checked for strict
positivity.

The recursive-type layer is primitive: `mu [F]`, with `in`, `out` and `ind`
taking an erased monotonicity witness from whose type the scheme F is read
off structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conversion import (
    ConvEnv, FuelExhausted, bohm_separate, kind_conv, term_conv, type_conv,
    type_nf, type_whnf,
)
from .core import (
    App, AppI, AppT, Beta, Branch, Builtin, CastElim, CoreTerm, CoreType,
    Delta, Fix, IntrCast, IntrTpEq, KPi, KStar, Kind, Lam, LamI, Match,
    Motive, PArm, PCase, PCtor, PFix, Phi, PureTerm, PVar, PApp, PLam, Rho,
    TAll, TAppT, TAppTm, TCast, TEq, TLam, TMu, TPi, TTpEq, TVar, TpEq1,
    TpEq2, Var, alpha_eq, arrow, erase, free_names, fresh_name, mk_app,
    split_app, split_tapp, subst, subst1,
)


class TypingError(Exception):
    def __init__(self, kind: str, msg: str):
        super().__init__(f"{kind}: {msg}")
        self.kind = kind
        self.msg = msg


@dataclass(frozen=True)
class CtorSig:
    name: str
    ty: CoreType  # as declared, data parameters free
    args: tuple  # ((name, marker, classifier), ...)
    result_indices: tuple  # (("term", CoreTerm) | ("type", CoreType), ...)


@dataclass(frozen=True)
class DataSig:
    name: str
    params: tuple  # ((name, classifier), ...)
    indices: tuple  # ((name, classifier), ...)
    kind: Kind
    ctors: tuple

    def ctor(self, name: str) -> CtorSig:
        for c in self.ctors:
            if c.name == name:
                return c
        raise TypingError("unbound_name", f"no constructor {name} in {self.name}")


@dataclass
class Context:
    fuel: int = 100000
    datas: dict = field(default_factory=dict)
    defs: dict = field(default_factory=dict)  # name -> (CoreType, CoreTerm)
    typedefs: dict = field(default_factory=dict)  # name -> (Kind, CoreType)
    ctor_owner: dict = field(default_factory=dict)  # ctor name -> data name

    def __post_init__(self):
        self.env = ConvEnv(fuel=self.fuel)

    def taken(self, name: str) -> bool:
        return (name in self.datas or name in self.defs
                or name in self.typedefs or name in self.ctor_owner)

    def claim(self, name: str):
        if self.taken(name):
            raise TypingError("name_clash", f"{name} is already defined")


def _is_kind(x) -> bool:
    return isinstance(x, (KStar, KPi))


# ---------------------------------------------------------------------------
# scopes: name -> ("term", CoreType) | ("type", Kind)

def bind_term(scope, x, ty):
    s = dict(scope)
    s[x] = ("term", ty)
    return s


def bind_type(scope, x, kind):
    s = dict(scope)
    s[x] = ("type", kind)
    return s


def bind_classifier(scope, x, cls):
    return bind_type(scope, x, cls) if _is_kind(cls) else bind_term(scope, x, cls)


def _freshen_binder(x: str, cod, scope):
    """Pick a name for binder x that shadows nothing in scope or cod."""
    if x not in scope:
        return x, cod
    x2 = fresh_name(x, set(scope) | free_names(cod))
    return x2, subst1(cod, x, x2)


# ---------------------------------------------------------------------------
# term scope checks (for equality endpoints and the like)

def scope_check_erasure(ctx: Context, scope, t: CoreTerm, what: str):
    for v in free_names(erase(t)):
        if v in ("out", "ind"):
            continue
        entry = scope.get(v)
        if entry is not None:
            if entry[0] != "term":
                raise TypingError("shape", f"{what}: {v} is a type, not a term")
            continue
        if v in ctx.defs or v in ctx.ctor_owner:
            continue
        raise TypingError("unbound_name", f"{what}: unbound {v}")


# ---------------------------------------------------------------------------
# datatype spines

def data_spine(ctx: Context, ty: CoreType):
    """Split a type into (DataSig, param actuals, index actuals) if it is a
    fully applied datatype, else return None."""
    head, args = split_tapp(type_whnf(ty, ctx.env))
    if not isinstance(head, TVar) or head.name not in ctx.datas:
        return None
    sig = ctx.datas[head.name]
    if len(args) != len(sig.params) + len(sig.indices):
        return None
    return sig, args[: len(sig.params)], args[len(sig.params):]


def ctor_global_type(ctx: Context, cname: str) -> CoreType:
    sig = ctx.datas[ctx.ctor_owner[cname]]
    ty = sig.ctor(cname).ty
    for p, cls in reversed(sig.params):
        ty = TAll(p, cls, ty)
    return ty


def data_head_type(sig: DataSig, pactuals, iactuals) -> CoreType:
    head: CoreType = TVar(sig.name)
    for (_, cls), (_, a) in zip(sig.params + sig.indices, pactuals + iactuals):
        head = TAppT(head, a) if _is_kind(cls) else TAppTm(head, a)
    return head


# ---------------------------------------------------------------------------
# kinding

def infer_kind(ctx: Context, scope, ty: CoreType) -> Kind:
    match ty:
        case TVar(x):
            entry = scope.get(x)
            if entry is not None:
                if entry[0] != "type":
                    raise TypingError("shape", f"{x} is a term, not a type")
                return entry[1]
            if x in ctx.typedefs:
                return ctx.typedefs[x][0]
            if x in ctx.datas:
                return data_full_kind(ctx.datas[x])
            raise TypingError("unbound_name", f"unbound type {x}")
        case TPi(x, dom, cod):
            _check_is_star(ctx, scope, dom, "function domain")
            x2, cod2 = _freshen_binder(x, cod, scope)
            _check_is_star(ctx, bind_term(scope, x2, dom), cod2, "function codomain")
            return KStar()
        case TAll(x, dom, cod):
            if _is_kind(dom):
                check_kind_wf(ctx, scope, dom)
                x2, cod2 = _freshen_binder(x, cod, scope)
                _check_is_star(ctx, bind_type(scope, x2, dom), cod2, "quantifier body")
            else:
                _check_is_star(ctx, scope, dom, "quantifier domain")
                x2, cod2 = _freshen_binder(x, cod, scope)
                _check_is_star(ctx, bind_term(scope, x2, dom), cod2, "quantifier body")
            return KStar()
        case TLam(x, dom, body):
            if _is_kind(dom):
                check_kind_wf(ctx, scope, dom)
            else:
                _check_is_star(ctx, scope, dom, "abstraction domain")
            x2, body2 = _freshen_binder(x, body, scope)
            k = infer_kind(ctx, bind_classifier(scope, x2, dom), body2)
            return KPi(x2, dom, k)
        case TAppT(fn, arg):
            kf = infer_kind(ctx, scope, fn)
            match kf:
                case KPi(x, dom, cod) if _is_kind(dom):
                    ka = infer_kind(ctx, scope, arg)
                    if not kind_conv(ka, dom, ctx.env):
                        raise TypingError("kind_mismatch", "type argument kind mismatch")
                    return subst1(cod, x, arg)
                case KPi(_, _, _):
                    raise TypingError("kind_mismatch", "expected a term argument here")
                case _:
                    raise TypingError("kind_mismatch", "not a type-level function")
        case TAppTm(fn, arg):
            kf = infer_kind(ctx, scope, fn)
            match kf:
                case KPi(x, dom, cod) if not _is_kind(dom):
                    check(ctx, scope, arg, dom)
                    return subst1(cod, x, arg)
                case KPi(_, _, _):
                    raise TypingError("kind_mismatch", "expected a bracketed type argument here")
                case _:
                    raise TypingError("kind_mismatch", "not a type-level function")
        case TEq(lhs, rhs):
            scope_check_erasure(ctx, scope, lhs, "equality endpoint")
            scope_check_erasure(ctx, scope, rhs, "equality endpoint")
            return KStar()
        case TCast(s, d) | TTpEq(s, d):
            _check_is_star(ctx, scope, s, "coercion side")
            _check_is_star(ctx, scope, d, "coercion side")
            return KStar()
        case TMu(fam):
            kf = infer_kind(ctx, scope, fam)
            if not kind_conv(kf, KPi("_", KStar(), KStar()), ctx.env):
                raise TypingError("kind_mismatch", "mu needs a scheme of kind * -> *")
            return KStar()
    raise TypingError("shape", f"not a type: {ty!r}")


def _check_is_star(ctx, scope, ty, what):
    k = infer_kind(ctx, scope, ty)
    if not isinstance(k, KStar):
        raise TypingError("kind_mismatch", f"{what} must live in *")


def check_kind_wf(ctx: Context, scope, k: Kind):
    match k:
        case KStar():
            return
        case KPi(x, dom, cod):
            if _is_kind(dom):
                check_kind_wf(ctx, scope, dom)
                check_kind_wf(ctx, bind_type(scope, x, dom), cod)
            else:
                _check_is_star(ctx, scope, dom, "kind domain")
                check_kind_wf(ctx, bind_term(scope, x, dom), cod)
            return
    raise TypingError("shape", f"not a kind: {k!r}")


def data_full_kind(sig: DataSig) -> Kind:
    k = sig.kind
    for p, cls in reversed(sig.params):
        k = KPi(p, cls, k)
    return k


# ---------------------------------------------------------------------------
# the mu primitives

def mu_family(ctx: Context, scope, mono: CoreTerm) -> CoreType:
    """Read the scheme F off the type of a monotonicity witness, which must
    normalize to  all X:*. all Y:*. Cast [X] [Y] => Cast [S] [S[X:=Y]]."""
    ty = type_nf(infer(ctx, scope, mono), ctx.env)
    match ty:
        case TAll(x, KStar(), TAll(y, KStar(), TAll(_, TCast(TVar(x2), TVar(y2)), TCast(s, t)))) \
                if x2 == x and y2 == y:
            if y in free_names(s):
                raise TypingError("shape", "monotonicity witness shape: scheme mixes its variables")
            if not type_conv(t, subst1(s, x, TVar(y)), ctx.env):
                raise TypingError("shape", "monotonicity witness shape: sides disagree")
            return TLam(x, KStar(), s)
    raise TypingError("shape", "not a monotonicity witness (expected all X. all Y. Cast [X] [Y] => Cast [F [X]] [F [Y]])")


def _builtin_applied_type(ctx: Context, scope, name: str, mono: CoreTerm) -> CoreType:
    fam = mu_family(ctx, scope, mono)
    mu = TMu(fam)
    avoid = set(free_names(fam)) | set(free_names(mono)) | set(scope)
    match name:
        case "in":
            r = fresh_name("R", avoid)
            return TAll(r, KStar(),
                        TAll("_", TCast(TVar(r), mu),
                             TPi("_", TAppT(fam, TVar(r)), mu)))
        case "out":
            return TPi("_", mu, TAppT(fam, mu))
        case "ind":
            p = fresh_name("P", avoid)
            r = fresh_name("R", avoid | {p})
            c = fresh_name("c", avoid | {p, r})
            v = fresh_name("v", avoid | {p, r, c})
            xs = fresh_name("xs", avoid | {p, r, c, v})
            applied_in = App(
                AppI(AppT(AppI(Builtin("in"), mono), TVar(r)), Var(c)), Var(xs))
            alg_ty = TAll(r, KStar(),
                          TAll(c, TCast(TVar(r), mu),
                               TPi("_",
                                   TPi(v, TVar(r), TAppTm(TVar(p), App(CastElim(Var(c)), Var(v)))),
                                   TPi(xs, TAppT(fam, TVar(r)),
                                       TAppTm(TVar(p), applied_in)))))
            return TAll(p, KPi("_", mu, KStar()),
                        TPi("_", alg_ty, TPi(v, mu, TAppTm(TVar(p), Var(v)))))
    raise TypingError("shape", f"unknown primitive {name}")


# ---------------------------------------------------------------------------
# typing

def infer(ctx: Context, scope, t: CoreTerm) -> CoreType:
    match t:
        case AppI(Builtin(name), mono):
            # the mu primitives acquire a type once their witness is supplied
            return _builtin_applied_type(ctx, scope, name, mono)
        case Var(x):
            entry = scope.get(x)
            if entry is not None:
                if entry[0] != "term":
                    raise TypingError("shape", f"{x} is a type, not a term")
                return entry[1]
            if x in ctx.defs:
                return ctx.defs[x][0]
            if x in ctx.ctor_owner:
                return ctor_global_type(ctx, x)
            raise TypingError("unbound_name", f"unbound {x}")
        case App(fn, arg):
            tf = type_whnf(infer(ctx, scope, fn), ctx.env)
            match tf:
                case TPi(x, dom, cod):
                    check(ctx, scope, arg, dom)
                    return subst1(cod, x, arg)
                case TAll(_, _, _):
                    raise TypingError("conversion_mismatch",
                                      "this argument must be erased (-arg) or a type ([T])")
                case _:
                    raise TypingError("conversion_mismatch", "applied a non-function")
        case AppI(fn, arg):
            tf = type_whnf(infer(ctx, scope, fn), ctx.env)
            match tf:
                case TAll(x, dom, cod) if not _is_kind(dom):
                    check(ctx, scope, arg, dom)
                    return subst1(cod, x, arg)
                case TAll(_, _, _):
                    raise TypingError("conversion_mismatch", "expected a type argument [T]")
                case TPi(_, _, _):
                    raise TypingError("conversion_mismatch", "this argument is relevant, drop the dash")
                case _:
                    raise TypingError("conversion_mismatch", "applied a non-function")
        case AppT(fn, ty):
            tf = type_whnf(infer(ctx, scope, fn), ctx.env)
            match tf:
                case TAll(x, dom, cod) if _is_kind(dom):
                    ka = infer_kind(ctx, scope, ty)
                    if not kind_conv(ka, dom, ctx.env):
                        raise TypingError("kind_mismatch", "type argument kind mismatch")
                    return subst1(cod, x, ty)
                case _:
                    raise TypingError("conversion_mismatch", "head does not take a type argument")
        case Lam(x, ann, body):
            if ann is None:
                raise TypingError("shape", "cannot infer an unannotated lambda")
            _check_is_star(ctx, scope, ann, "lambda annotation")
            cod = infer(ctx, bind_term(scope, x, ann), body)
            return TPi(x, ann, cod)
        case LamI(x, ann, body):
            if ann is None:
                raise TypingError("shape", "cannot infer an unannotated erased lambda")
            if _is_kind(ann):
                check_kind_wf(ctx, scope, ann)
                sub = bind_type(scope, x, ann)
            else:
                _check_is_star(ctx, scope, ann, "erased lambda annotation")
                sub = bind_term(scope, x, ann)
            _erased_escape_check(x, body, "erased lambda")
            cod = infer(ctx, sub, body)
            return TAll(x, ann, cod)
        case Phi(q, main, shadow):
            tq = type_whnf(infer(ctx, scope, q), ctx.env)
            match tq:
                case TEq(lhs, rhs):
                    tm = infer(ctx, scope, main)
                    if not term_conv(lhs, main, ctx.env):
                        raise TypingError("conversion_mismatch",
                                          "phi: the equality's left side is not the typed term")
                    scope_check_erasure(ctx, scope, shadow, "phi replacement")
                    if not term_conv(rhs, shadow, ctx.env):
                        raise TypingError("conversion_mismatch",
                                          "phi: the equality's right side is not the replacement")
                    return tm
                case _:
                    raise TypingError("conversion_mismatch", "phi needs an equality proof")
        case Rho(q, x, motive, body):
            # from q : {a ~ b}, produces motive[a] out of a proof of motive[b]
            tq = type_whnf(infer(ctx, scope, q), ctx.env)
            match tq:
                case TEq(lhs, rhs):
                    at_rhs = subst1(motive, x, rhs)
                    _check_is_star(ctx, scope, at_rhs, "rewrite motive")
                    check(ctx, scope, body, at_rhs)
                    at_lhs = subst1(motive, x, lhs)
                    _check_is_star(ctx, scope, at_lhs, "rewrite result")
                    return at_lhs
                case _:
                    raise TypingError("conversion_mismatch", "rho needs an equality proof")
        case IntrCast(fn, prf):
            tf = type_whnf(infer(ctx, scope, fn), ctx.env)
            match tf:
                case TPi(x, dom, cod):
                    if x in free_names(cod):
                        raise TypingError("shape", "cast functions must be non-dependent")
                    y = fresh_name("y", set(scope) | free_names(fn))
                    want = TPi(y, dom, TEq(App(fn, Var(y)), Var(y)))
                    check(ctx, scope, prf, want)
                    return TCast(dom, cod)
                case _:
                    raise TypingError("conversion_mismatch", "intrCast needs a function")
        case CastElim(c):
            tc = type_whnf(infer(ctx, scope, c), ctx.env)
            match tc:
                case TCast(s, d):
                    return arrow(s, d)
                case _:
                    raise TypingError("conversion_mismatch", "cast needs a coercion witness")
        case IntrTpEq(fwd, bwd):
            t1 = type_whnf(infer(ctx, scope, fwd), ctx.env)
            t2 = type_whnf(infer(ctx, scope, bwd), ctx.env)
            match t1, t2:
                case TCast(s, d), TCast(s2, d2):
                    if not (type_conv(s, d2, ctx.env) and type_conv(d, s2, ctx.env)):
                        raise TypingError("conversion_mismatch",
                                          "intrTpEq: the two coercions are not opposites")
                    return TTpEq(s, d)
                case _:
                    raise TypingError("conversion_mismatch", "intrTpEq needs two coercion witnesses")
        case TpEq1(e):
            te = type_whnf(infer(ctx, scope, e), ctx.env)
            match te:
                case TTpEq(s, d):
                    return arrow(s, d)
                case _:
                    raise TypingError("conversion_mismatch", "tpEq1 needs a type equivalence")
        case TpEq2(e):
            te = type_whnf(infer(ctx, scope, e), ctx.env)
            match te:
                case TTpEq(s, d):
                    return arrow(d, s)
                case _:
                    raise TypingError("conversion_mismatch", "tpEq2 needs a type equivalence")
        case Match(_, _, _):
            return check_match(ctx, scope, t, None)
        case Beta():
            raise TypingError("shape", "beta needs an expected equality type")
        case Delta(_):
            raise TypingError("shape", "delta needs an expected type")
        case Fix(_, _, _, _):
            raise TypingError("shape", "a fix needs an expected type")
        case Builtin(name):
            raise TypingError("shape", f"{name} must be applied to its monotonicity witness first")
    raise TypingError("shape", f"cannot infer: {t!r}")


def _open_against(x, body, y, cod, scope):
    """Line up a lambda binder x with the expected binder y, renaming away
    from anything the codomain might capture (e.g. a global also named x)."""
    if x == y:
        return x, body, cod
    if x in scope or x in free_names(cod):
        x2 = fresh_name(x, set(scope) | free_names(cod) | free_names(body))
        return x2, subst1(body, x, x2), subst1(cod, y, x2)
    return x, body, subst1(cod, y, x)


def _erased_escape_check(x: str, body: CoreTerm, what: str):
    if x in free_names(erase(body)):
        raise TypingError("erased_var_escape",
                          f"{what}: {x} is erased but appears in the erasure")


def check(ctx: Context, scope, t: CoreTerm, expected: CoreType):
    want = type_whnf(expected, ctx.env)
    match t, want:
        case Lam(x, ann, body), TPi(y, dom, cod):
            if ann is not None:
                _check_is_star(ctx, scope, ann, "lambda annotation")
                if not type_conv(ann, dom, ctx.env):
                    raise TypingError("conversion_mismatch", "lambda annotation mismatch")
            x2, body2, cod2 = _open_against(x, body, y, cod, scope)
            check(ctx, bind_term(scope, x2, dom), body2, cod2)
            return
        case Lam(_, _, _), _:
            raise TypingError("conversion_mismatch", "lambda against a non-function type")
        case LamI(x, ann, body), TAll(y, dom, cod):
            if ann is not None:
                if _is_kind(ann) != _is_kind(dom):
                    raise TypingError("conversion_mismatch", "erased binder sort mismatch")
                if _is_kind(ann):
                    if not kind_conv(ann, dom, ctx.env):
                        raise TypingError("kind_mismatch", "erased binder kind mismatch")
                elif not type_conv(ann, dom, ctx.env):
                    raise TypingError("conversion_mismatch", "erased binder annotation mismatch")
            x2, body2, cod2 = _open_against(x, body, y, cod, scope)
            sub = bind_type(scope, x2, dom) if _is_kind(dom) else bind_term(scope, x2, dom)
            _erased_escape_check(x2, body2, "erased lambda")
            check(ctx, sub, body2, cod2)
            return
        case LamI(_, _, _), _:
            raise TypingError("conversion_mismatch", "erased lambda against a non-quantifier")
        case Beta(), TEq(lhs, rhs):
            if not term_conv(lhs, rhs, ctx.env):
                raise TypingError("conversion_mismatch",
                                  "beta: the two sides are not definitionally equal")
            return
        case Beta(), _:
            raise TypingError("conversion_mismatch", "beta proves equalities only")
        case Delta(prf), _:
            tq = type_whnf(infer(ctx, scope, prf), ctx.env)
            match tq:
                case TEq(lhs, rhs):
                    try:
                        la = ctx.env.norm_term(lhs)
                        ra = ctx.env.norm_term(rhs)
                    except FuelExhausted:
                        raise TypingError("fuel", "ran out of fuel normalizing a discrimination")
                    sep = bohm_separate(la, ra, fuel=ctx.fuel)
                    if sep.status != "separated":
                        raise TypingError("delta_inapplicable",
                                          f"delta: sides are not separable ({sep.status})")
                    return
                case _:
                    raise TypingError("conversion_mismatch", "delta needs an equality proof")
        case IntrCast(fn, prf), TCast(s, d):
            check(ctx, scope, fn, arrow(s, d))
            y = fresh_name("y", set(scope) | free_names(fn))
            check(ctx, scope, prf, TPi(y, s, TEq(App(fn, Var(y)), Var(y))))
            return
        case IntrTpEq(fwd, bwd), TTpEq(s, d):
            check(ctx, scope, fwd, TCast(s, d))
            check(ctx, scope, bwd, TCast(d, s))
            return
        case Match(_, _, _), _:
            got = check_match(ctx, scope, t, want)
            if got is not None and not type_conv(got, want, ctx.env):
                raise TypingError("conversion_mismatch", "match result type mismatch")
            return
        case Fix(_, _, _, _), _:
            check_fix(ctx, scope, t, want)
            return
        case _, _:
            got = infer(ctx, scope, t)
            if not type_conv(got, want, ctx.env):
                raise TypingError(
                    "conversion_mismatch",
                    f"term does not have the expected type (inferred {got!r})")
            return


# ---------------------------------------------------------------------------
# match and fix

def check_match(ctx: Context, scope, m: Match, want):
    """Type a match; returns its type (or None when fully driven by `want`
    through a constant motive)."""
    ts = infer(ctx, scope, m.scrut)
    spine = data_spine(ctx, ts)
    if spine is None:
        raise TypingError("shape", "match scrutinee is not of datatype type")
    sig, pactuals, iactuals = spine

    if m.motive is not None:
        motive = m.motive
        if len(motive.ivars) != len(sig.indices):
            raise TypingError("motive",
                              f"motive must bind the {len(sig.indices)} indices of {sig.name}")
        _kindcheck_motive(ctx, scope, sig, pactuals, motive)
        result = _motive_at(motive, iactuals, m.scrut)
        constant = False
    else:
        if want is None:
            raise TypingError("motive", "cannot infer a motive-less match; annotate or add @")
        avoid = set(free_names(want)) | set(scope)
        names = []
        for _ in sig.indices:
            n = fresh_name("i", avoid)
            avoid.add(n)
            names.append(n)
        motive = Motive(tuple(names), fresh_name("s", avoid), want)
        result = want
        constant = True

    _check_branches(ctx, scope, sig, pactuals, iactuals, motive, m.branches,
                    fix_mode=False)
    return None if constant else result


def _kindcheck_motive(ctx: Context, scope, sig: DataSig, pactuals, motive: Motive):
    sub = dict(scope)
    mapping = {p: a for (p, _), (_, a) in zip(sig.params, pactuals)}
    ivals = []
    for (iname, icls), v in zip(sig.indices, motive.ivars):
        cls = subst(icls, mapping)
        sub = bind_classifier(sub, v, cls)
        if _is_kind(icls):
            mapping[iname] = TVar(v)
            ivals.append(("type", TVar(v)))
        else:
            mapping[iname] = Var(v)
            ivals.append(("term", Var(v)))
    sub = bind_term(sub, motive.svar, data_head_type(sig, pactuals, ivals))
    _check_is_star(ctx, sub, motive.body, "match motive")


def _motive_at(motive: Motive, iactuals, scrut) -> CoreType:
    mapping = {}
    for v, (_, a) in zip(motive.ivars, iactuals):
        mapping[v] = a
    mapping[motive.svar] = scrut
    return subst(motive.body, mapping)


def _check_branches(ctx: Context, scope, sig: DataSig, pactuals, iactuals,
                    motive: Motive, branches, fix_mode: bool,
                    fix_extra=None):
    declared = [c.name for c in sig.ctors]
    got = [b.ctor for b in branches]
    if got != declared:
        raise TypingError(
            "coverage",
            f"branches must cover the constructors of {sig.name} in order "
            f"(expected {declared}, found {got})")

    param_map = {p: a for (p, _), (_, a) in zip(sig.params, pactuals)}
    for b in branches:
        csig = sig.ctor(b.ctor)
        if len(b.vars) != len(csig.args):
            raise TypingError("arity", f"branch {b.ctor}: expected {len(csig.args)} bindings")
        mapping = dict(param_map)
        bindings = []
        pattern_args = []
        for bv, (aname, marker, cls) in zip(b.vars, csig.args):
            if bv.marker != marker:
                raise TypingError(
                    "arity",
                    f"branch {b.ctor}: binding {bv.name} must be {marker}")
            bindings.append((bv.name, subst(cls, mapping)))
            if marker == "type":
                mapping[aname] = TVar(bv.name)
                pattern_args.append(("type", TVar(bv.name)))
            else:
                mapping[aname] = Var(bv.name)
                pattern_args.append((marker, Var(bv.name)))

        ctor_indices = [(s, subst(v, mapping)) for s, v in csig.result_indices]

        # pattern binders shadow the fix's own names, so those go in first
        sub = dict(scope)
        if fix_extra is not None:
            fname, fty, svar_name = fix_extra
            sub = bind_term(sub, fname, fty)
            sub = bind_term(sub, svar_name, data_head_type(sig, pactuals, ctor_indices))
        for bname, cls2 in bindings:
            sub = bind_classifier(sub, bname, cls2)

        if fix_mode:
            if b.eqs:
                raise TypingError("shape",
                                  "a fix branch takes no equations; its indices are generic")
        else:
            if len(b.eqs) > len(ctor_indices):
                raise TypingError(
                    "arity",
                    f"branch {b.ctor}: at most {len(ctor_indices)} equation names "
                    f"(one per index, in declaration order)")
            slot_map = dict(param_map)
            for (iname, _), (_, ia) in zip(sig.indices, iactuals):
                slot_map[iname] = ia
            bound_cls = dict(bindings)
            for pos, ename in enumerate(b.eqs):
                sort, cv = ctor_indices[pos]
                _, ia = iactuals[pos]
                if sort == "term":
                    eq = TEq(ia, cv)
                else:
                    eq = _type_index_equation(ctx, sub, sig, pos, slot_map,
                                              bound_cls, b.ctor, ia, cv)
                sub = bind_term(sub, ename, eq)

        pattern = mk_app(_ctor_head(ctx, sig, b.ctor, pactuals), pattern_args)
        want = _motive_at(motive, ctor_indices, pattern)
        check(ctx, sub, b.body, want)

        erased_here = [bv.name for bv in b.vars if bv.marker != "term"] + list(b.eqs)
        body_erasure_free = free_names(erase(b.body))
        for name in erased_here:
            if name in body_erasure_free:
                raise TypingError("erased_var_escape",
                                  f"branch {b.ctor}: {name} is erased but appears in the erasure")


def _type_index_equation(ctx: Context, sub, sig: DataSig, pos: int, slot_map,
                         bound_cls, cname: str, actual: CoreType,
                         ctor_var: CoreType) -> CoreType:
    """Equation classifier linking a scrutinee's type index to the pattern's.

    The two sides can have kinds that agree only propositionally (their
    embedded terms are equal, not convertible), so family-kinded indices get
    a heterogeneous pointwise statement rather than one type equality.
    """
    slot_kind = subst(sig.indices[pos][1], slot_map)
    match slot_kind:
        case KStar():
            return TTpEq(actual, ctor_var)
        case KPi(_, dom, KStar()) if not _is_kind(dom):
            if not (isinstance(ctor_var, TVar) and ctor_var.name in bound_cls):
                raise TypingError("shape",
                                  f"branch {cname}: index {pos} is not the "
                                  "constructor's own variable")
            ck = bound_cls[ctor_var.name]
            match ck:
                case KPi(_, dom2, KStar()) if not _is_kind(dom2):
                    pass
                case _:
                    raise TypingError("shape",
                                      f"branch {cname}: index {pos} kind mismatch")
            avoid = (set(sub) | free_names(actual) | free_names(ctor_var)
                     | free_names(dom) | free_names(dom2))
            x1 = fresh_name("x", avoid)
            x2 = fresh_name("x", avoid | {x1})
            return TPi(x1, dom,
                       TPi(x2, dom2,
                           arrow(TEq(Var(x1), Var(x2)),
                                 TTpEq(TAppTm(actual, Var(x1)),
                                       TAppTm(ctor_var, Var(x2))))))
        case _:
            raise TypingError(
                "shape",
                f"branch {cname}: index {pos} has a kind too rich for a "
                "match equation")


def _ctor_head(ctx: Context, sig: DataSig, cname: str, pactuals) -> CoreTerm:
    head: CoreTerm = Var(cname)
    for (_, cls), (_, a) in zip(sig.params, pactuals):
        head = AppT(head, a) if _is_kind(cls) else AppI(head, a)
    return head


def check_fix(ctx: Context, scope, f: Fix, want: CoreType):
    if not f.branches:
        raise TypingError("shape", "a fix needs at least one branch")
    first = f.branches[0].ctor
    if first not in ctx.ctor_owner:
        raise TypingError("unbound_name", f"unknown constructor {first}")
    sig = ctx.datas[ctx.ctor_owner[first]]

    # peel: all i1 ... all ik. Pi x: D params i1..ik. body
    want = type_whnf(want, ctx.env)
    ivars = []
    cursor = want
    for iname, icls in sig.indices:
        cursor = type_whnf(cursor, ctx.env)
        match cursor:
            case TAll(v, dom, cod):
                if _is_kind(dom) != _is_kind(icls):
                    raise TypingError("shape", "fix type: index sort mismatch")
                ivars.append((v, dom))
                cursor = cod
            case _:
                raise TypingError("shape",
                                  "fix type must quantify the datatype's indices erased")
    cursor = type_whnf(cursor, ctx.env)
    match cursor:
        case TPi(x, dom, cod):
            spine = data_spine(ctx, dom)
            if spine is None or spine[0].name != sig.name:
                raise TypingError("shape", f"fix must take a {sig.name} argument")
            _, pactuals, iactuals = spine
            for (v, _), (_, a) in zip(ivars, iactuals):
                ok = (isinstance(a, Var) and a.name == v) or \
                     (isinstance(a, TVar) and a.name == v)
                if not ok:
                    raise TypingError("shape",
                                      "fix type: the datatype's indices must be exactly "
                                      "the quantified variables")
            body = cod
            svar = x
        case _:
            raise TypingError("shape", "fix type must end in a function over the datatype")

    if len(f.motive.ivars) != len(sig.indices):
        raise TypingError("motive",
                          f"fix motive must bind the {len(sig.indices)} indices of {sig.name}")

    # align the declared motive with the peeled type on fresh names
    avoid = (set(scope) | free_names(f.motive.body) | free_names(body)
             | {svar, f.motive.svar} | {v for v, _ in ivars})
    zs = []
    for _ in ivars:
        z = fresh_name("i", avoid)
        avoid.add(z)
        zs.append(z)
    sz = fresh_name("s", avoid)
    motive_body = subst(f.motive.body,
                        {**{mv: z for mv, z in zip(f.motive.ivars, zs)},
                         f.motive.svar: sz})
    peeled_body = subst(body, {**{v: z for (v, _), z in zip(ivars, zs)}, svar: sz})
    if not type_conv(motive_body, peeled_body, ctx.env):
        raise TypingError("conversion_mismatch", "fix motive does not match its declared type")

    motive = Motive(tuple(zs), sz, motive_body)
    _check_branches(ctx, scope, sig, pactuals, iactuals, motive, f.branches,
                    fix_mode=True, fix_extra=(f.fn, want, f.var))
    check_termination(ctx, f)


# ---------------------------------------------------------------------------
# termination: recursive calls must descend on pattern components

def check_termination(ctx: Context, f: Fix):
    pf = erase(f)
    assert isinstance(pf, PFix)
    for arm, b in zip(pf.arms, f.branches):
        smaller = _datatype_pattern_vars(ctx, ctx.datas[ctx.ctor_owner[b.ctor]], b)
        smaller &= set(arm.vars)  # erased pattern vars never drive recursion
        _descent(pf.fn, arm.body, smaller, f.fn)


def _datatype_pattern_vars(ctx: Context, sig: DataSig, b: Branch) -> set:
    csig = sig.ctor(b.ctor)
    out = set()
    for bv, (_, marker, cls) in zip(b.vars, csig.args):
        if marker != "term":
            continue
        t = type_whnf(cls, ctx.env)
        # peel premise telescopes: a function returning the datatype hands
        # out subterms of the matched value, so calls through it descend
        while True:
            match t:
                case TPi(_, _, cod) | TAll(_, _, cod):
                    t = type_whnf(cod, ctx.env)
                case _:
                    break
        head, _ = split_tapp(t)
        if isinstance(head, TVar) and head.name == sig.name:
            out.add(bv.name)
    return out


def _descent(fn: str, t: PureTerm, smaller: set, orig_name: str):
    match t:
        case PVar(x):
            if x == fn:
                raise TypingError("termination",
                                  f"{orig_name}: recursive use must be applied to a "
                                  "structurally smaller argument")
        case PLam(x, body):
            if x != fn:
                _descent(fn, body, smaller - {x}, orig_name)
        case PApp(_, _):
            head, args = _papp_spine(t)
            if head == PVar(fn):
                if not args:
                    raise TypingError("termination", f"{orig_name}: bare recursive reference")
                h, _ = _papp_spine(args[0])
                if not (isinstance(h, PVar) and h.name in smaller):
                    raise TypingError(
                        "termination",
                        f"{orig_name}: recursive call's argument is not a pattern component")
                for a in args:
                    _descent(fn, a, smaller, orig_name)
            else:
                _descent(fn, t.fn, smaller, orig_name)
                _descent(fn, t.arg, smaller, orig_name)
        case PCtor(_, args):
            for a in args:
                _descent(fn, a, smaller, orig_name)
        case PCase(scrut, arms):
            _descent(fn, scrut, smaller, orig_name)
            h, _ = _papp_spine(scrut)
            lineage = isinstance(h, PVar) and h.name in smaller
            for a in arms:
                sub = smaller - set(a.vars)
                if lineage:
                    sub = sub | set(a.vars)
                if fn not in a.vars:
                    _descent(fn, a.body, sub, orig_name)
        case PFix(g, x, arms):
            if fn in (g, x):
                return
            for a in arms:
                if fn not in a.vars:
                    _descent(fn, a.body, smaller - set(a.vars) - {g, x}, orig_name)


def _papp_spine(t: PureTerm):
    args = []
    while isinstance(t, PApp):
        args.append(t.arg)
        t = t.fn
    return t, list(reversed(args))


# ---------------------------------------------------------------------------
# declarations

def declare_def(ctx: Context, name: str, ty: CoreType, body: CoreTerm):
    ctx.claim(name)
    _check_is_star(ctx, {}, ty, f"type of {name}")
    check(ctx, {}, body, ty)
    ctx.defs[name] = (ty, body)
    ctx.env.defs[name] = erase(body)


def declare_typedef(ctx: Context, name: str, kind: Kind, body: CoreType):
    ctx.claim(name)
    check_kind_wf(ctx, {}, kind)
    k = infer_kind(ctx, {}, body)
    if not kind_conv(k, kind, ctx.env):
        raise TypingError("kind_mismatch", f"type definition {name}: kind mismatch")
    ctx.typedefs[name] = (kind, body)
    ctx.env.typedefs[name] = body


def declare_data(ctx: Context, name: str, params, kind: Kind, ctors):
    ctx.claim(name)
    scope = {}
    for p, cls in params:
        if _is_kind(cls):
            check_kind_wf(ctx, scope, cls)
            scope = bind_type(scope, p, cls)
        else:
            _check_is_star(ctx, scope, cls, f"parameter {p}")
            scope = bind_term(scope, p, cls)
    check_kind_wf(ctx, scope, kind)
    indices = _kind_telescope(kind)

    # let the type recur while checking its constructors
    full = kind
    for p, cls in reversed(params):
        full = KPi(p, cls, full)
    sig0 = DataSig(name, tuple(params), tuple(indices), kind, ())
    ctx.datas[name] = sig0

    csigs = []
    try:
        seen = set()
        for cname, cty in ctors:
            if ctx.taken(cname) or cname in seen or cname in ("in", "out", "ind"):
                raise TypingError("name_clash", f"constructor name {cname} unavailable")
            seen.add(cname)
            _check_is_star(ctx, scope, cty, f"constructor {cname}")
            csigs.append(_digest_ctor(ctx, sig0, scope, cname, cty))
    except Exception:
        del ctx.datas[name]
        raise

    ctx.datas[name] = DataSig(name, tuple(params), tuple(indices), kind, tuple(csigs))
    for c in csigs:
        ctx.ctor_owner[c.name] = name
    ctx.env.ctors.update(c.name for c in csigs)


def _kind_telescope(kind: Kind):
    indices = []
    k = kind
    names = set()
    while isinstance(k, KPi):
        n = k.var
        if n == "_" or n in names:
            n = fresh_name("i", names | {"_"})
        names.add(n)
        indices.append((n, k.dom))
        k = subst1(k.cod, k.var, n) if n != k.var else k.cod
    if not isinstance(k, KStar):
        raise TypingError("shape", "a datatype kind must end in *")
    return indices


def _digest_ctor(ctx: Context, sig: DataSig, scope, cname: str, cty: CoreType) -> CtorSig:
    args = []
    sub = dict(scope)
    cursor = cty
    while True:
        cursor = type_whnf(cursor, ctx.env)
        match cursor:
            case TPi(x, dom, cod):
                _assert_positive(sig, dom, f"constructor {cname}")
                x2, cod2 = _freshen_binder(x, cod, sub)
                args.append((x2, "term", dom))
                sub = bind_term(sub, x2, dom)
                cursor = cod2
            case TAll(x, dom, cod) if _is_kind(dom):
                x2, cod2 = _freshen_binder(x, cod, sub)
                args.append((x2, "type", dom))
                sub = bind_type(sub, x2, dom)
                cursor = cod2
            case TAll(x, dom, cod):
                _assert_positive(sig, dom, f"constructor {cname}")
                x2, cod2 = _freshen_binder(x, cod, sub)
                args.append((x2, "erased", dom))
                sub = bind_term(sub, x2, dom)
                cursor = cod2
            case _:
                break

    head, applied = split_tapp(cursor)
    if not (isinstance(head, TVar) and head.name == sig.name):
        raise TypingError("shape", f"constructor {cname} must return {sig.name}")
    if len(applied) != len(sig.params) + len(sig.indices):
        raise TypingError("arity", f"constructor {cname}: result not fully applied")
    for (p, _), (_, a) in zip(sig.params, applied):
        ok = (isinstance(a, TVar) or isinstance(a, Var)) and a.name == p
        if not ok:
            raise TypingError("shape",
                              f"constructor {cname}: parameters must be uniform "
                              f"(expected {p})")
    result_indices = []
    type_index_vars = set()
    tele_types = {n for n, m, _ in args if m == "type"}
    for (_, icls), (s, a) in zip(sig.indices, applied[len(sig.params):]):
        if _is_kind(icls):
            if not (isinstance(a, TVar) and a.name in tele_types
                    and a.name not in type_index_vars):
                raise TypingError(
                    "shape",
                    f"constructor {cname}: a type index must be the constructor's "
                    "own quantified variable, used once")
            type_index_vars.add(a.name)
            result_indices.append(("type", a))
        else:
            result_indices.append(("term", a))
    return CtorSig(cname, cty, tuple(args), tuple(result_indices))


def _assert_positive(sig: DataSig, ty: CoreType, where: str):
    """Strict positivity: the datatype may appear only as the head of spine
    positions reached purely through function codomains, always applied to
    its own parameters."""
    dname = sig.name

    def no_occur(x):
        if dname in free_names(x):
            raise TypingError("positivity",
                              f"{where}: {dname} occurs in a forbidden position")

    def pos(t: CoreType):
        match t:
            case TPi(_, dom, cod) | TAll(_, dom, cod):
                no_occur(dom)
                pos(cod)
            case _:
                head, args = split_tapp(t)
                if isinstance(head, TVar) and head.name == dname:
                    for (p, _), (_, a) in zip(sig.params, args):
                        if not ((isinstance(a, TVar) or isinstance(a, Var))
                                and a.name == p):
                            raise TypingError(
                                "positivity",
                                f"{where}: recursive {dname} must keep its parameters")
                    for _, a in args:
                        no_occur(a)
                else:
                    no_occur(t)

    pos(ty)
