"""Normalization and definitional equality.

Terms are compared by erasing, normalizing (beta, eta, case selection,
recursive unfolding against constructor heads, plus the two laws for the
recursive-type primitives) and testing alpha equality.  Types are compared
structurally after unfolding type abbreviations and reducing type-level
redexes; every term embedded in a type is compared via its erasure.

`bohm_separate` decides whether two erased normal forms can be told apart
by a closing context, which is what licenses proof discrimination: it
returns a concrete context that the caller can run on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    CoreTerm, CoreType, KPi, KStar, Kind, PApp, PArm, PCase, PCtor, PFix,
    PLam, PVar, PureTerm, TAll, TAppT, TAppTm, TCast, TEq, TLam, TMu, TPi,
    TTpEq, TVar, Var, alpha_eq, erase, free_names, fresh_name, subst, subst1,
)


class FuelExhausted(Exception):
    pass


TRUE = PLam("t", PLam("f", PVar("t")))
FALSE = PLam("t", PLam("f", PVar("f")))


class Normalizer:
    """Normal-order reducer for erased terms.

    `steps` counts proper reductions (beta, eta, case selection, recursive
    unfolding, out/ind laws); definition unfolding spends fuel but is not a
    step, so step counts reflect run-time work only.
    """

    def __init__(self, defs=None, ctors=(), fuel: int = 100000):
        self.defs = dict(defs or {})
        self.ctors = set(ctors)
        self.fuel = fuel
        self.steps = 0

    def _spend(self, proper: bool = True):
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted()
        if proper:
            self.steps += 1

    def normalize(self, t: PureTerm) -> PureTerm:
        t = self.whnf(t)
        match t:
            case PVar(_):
                return t
            case PLam(x, b):
                nb = self.normalize(b)
                match nb:
                    case PApp(g, PVar(y)) if y == x and x not in free_names(g):
                        self._spend()
                        return g
                    case PCtor(c, args) if args and args[-1] == PVar(x) and all(
                            x not in free_names(a) for a in args[:-1]):
                        self._spend()
                        return PCtor(c, args[:-1])
                    case _:
                        return PLam(x, nb)
            case PApp(f, a):
                return PApp(self.normalize(f), self.normalize(a))
            case PCtor(c, args):
                return PCtor(c, tuple(self.normalize(a) for a in args))
            case PCase(s, arms):
                return PCase(self.normalize(s), tuple(self._nf_arm(a) for a in arms))
            case PFix(fn, var, arms):
                return PFix(fn, var, tuple(self._nf_arm(a) for a in arms))
        raise TypeError(f"normalize: {t!r}")

    def _nf_arm(self, a: PArm) -> PArm:
        return PArm(a.ctor, a.vars, self.normalize(a.body))

    def whnf(self, t: PureTerm) -> PureTerm:
        while True:
            match t:
                case PVar(x) if x in self.ctors or x == "in":
                    t = PCtor(x, ())
                case PVar(x) if x in self.defs:
                    self._spend(proper=False)
                    t = self.defs[x]
                case PApp(fn, arg):
                    fn = self.whnf(fn)
                    match fn:
                        case PLam(x, body):
                            self._spend()
                            t = subst1(body, x, arg)
                        case PCtor(c, args):
                            t = PCtor(c, args + (arg,))
                        case PFix(f, x, arms):
                            arg2 = self.whnf(arg)
                            hit = self._arm_for(arms, arg2)
                            if hit is None:
                                return PApp(fn, arg2)
                            self._spend()
                            m = dict(zip(hit.vars, arg2.args))
                            m[f] = fn
                            m[x] = arg2
                            t = subst(hit.body, m)
                        case PVar("out"):
                            arg2 = self.whnf(arg)
                            if isinstance(arg2, PCtor) and arg2.name == "in" and len(arg2.args) == 1:
                                self._spend()
                                t = arg2.args[0]
                            else:
                                return PApp(fn, arg2)
                        case PApp(PVar("ind"), alg):
                            arg2 = self.whnf(arg)
                            if isinstance(arg2, PCtor) and arg2.name == "in" and len(arg2.args) == 1:
                                self._spend()
                                r = fresh_name("r", free_names(alg))
                                rec = PLam(r, PApp(PApp(PVar("ind"), alg), PVar(r)))
                                t = PApp(PApp(alg, rec), arg2.args[0])
                            else:
                                return PApp(fn, arg2)
                        case _:
                            return PApp(fn, arg)
                case PCase(s, arms):
                    s2 = self.whnf(s)
                    hit = self._arm_for(arms, s2)
                    if hit is None:
                        return PCase(s2, arms)
                    self._spend()
                    t = subst(hit.body, dict(zip(hit.vars, s2.args)))
                case _:
                    return t

    @staticmethod
    def _arm_for(arms, scrut) -> Optional[PArm]:
        if not isinstance(scrut, PCtor):
            return None
        for a in arms:
            if a.ctor == scrut.name and len(a.vars) == len(scrut.args):
                return a
        return None


# ---------------------------------------------------------------------------
# type conversion


@dataclass
class ConvEnv:
    defs: dict = field(default_factory=dict)
    typedefs: dict = field(default_factory=dict)
    ctors: set = field(default_factory=set)
    fuel: int = 100000

    def normalizer(self) -> Normalizer:
        return Normalizer(self.defs, self.ctors, self.fuel)

    def norm_term(self, t: CoreTerm) -> PureTerm:
        return self.normalizer().normalize(erase(t))


def term_conv(a: CoreTerm, b: CoreTerm, env: ConvEnv) -> bool:
    return alpha_eq(env.norm_term(a), env.norm_term(b))


def _is_kind(x) -> bool:
    return isinstance(x, (KStar, KPi))


def type_whnf(ty: CoreType, env: ConvEnv, _depth: int = 0) -> CoreType:
    if _depth > env.fuel:
        raise FuelExhausted()
    match ty:
        case TVar(x) if x in env.typedefs:
            return type_whnf(env.typedefs[x], env, _depth + 1)
        case TAppT(fn, arg):
            fn2 = type_whnf(fn, env, _depth + 1)
            if isinstance(fn2, TLam) and _is_kind(fn2.dom):
                return type_whnf(subst1(fn2.body, fn2.var, arg), env, _depth + 1)
            return TAppT(fn2, arg)
        case TAppTm(fn, arg):
            fn2 = type_whnf(fn, env, _depth + 1)
            if isinstance(fn2, TLam) and not _is_kind(fn2.dom):
                return type_whnf(subst1(fn2.body, fn2.var, arg), env, _depth + 1)
            return TAppTm(fn2, arg)
        case _:
            return ty


def type_nf(ty: CoreType, env: ConvEnv) -> CoreType:
    """Full type-level normal form; embedded terms are left untouched."""
    ty = type_whnf(ty, env)
    match ty:
        case TVar(_) | TEq(_, _):
            return ty
        case TPi(x, dom, cod):
            return TPi(x, type_nf(dom, env), type_nf(cod, env))
        case TAll(x, dom, cod):
            return TAll(x, _classifier_nf(dom, env), type_nf(cod, env))
        case TLam(x, dom, body):
            return TLam(x, _classifier_nf(dom, env), type_nf(body, env))
        case TAppT(fn, arg):
            return TAppT(type_nf(fn, env), type_nf(arg, env))
        case TAppTm(fn, arg):
            return TAppTm(type_nf(fn, env), arg)
        case TCast(s, d):
            return TCast(type_nf(s, env), type_nf(d, env))
        case TTpEq(s, d):
            return TTpEq(type_nf(s, env), type_nf(d, env))
        case TMu(f):
            return TMu(type_nf(f, env))
    raise TypeError(f"type_nf: {ty!r}")


def _classifier_nf(c, env):
    return kind_nf(c, env) if _is_kind(c) else type_nf(c, env)


def kind_nf(k: Kind, env: ConvEnv) -> Kind:
    match k:
        case KStar():
            return k
        case KPi(x, dom, cod):
            return KPi(x, _classifier_nf(dom, env), kind_nf(cod, env))
    raise TypeError(f"kind_nf: {k!r}")


def type_conv(a: CoreType, b: CoreType, env: ConvEnv) -> bool:
    a = type_whnf(a, env)
    b = type_whnf(b, env)
    match a, b:
        case TVar(x), TVar(y):
            return x == y
        case (TPi(x, d1, c1), TPi(y, d2, c2)) | (TAll(x, d1, c1), TAll(y, d2, c2)):
            if not _classifier_conv(d1, d2, env):
                return False
            f = fresh_name(x, free_names(c1) | free_names(c2))
            return type_conv(subst1(c1, x, f), subst1(c2, y, f), env)
        case TLam(x, _, c1), TLam(y, _, c2):
            # a type function's domain is annotation, not observable content;
            # two families agree when their bodies do
            f = fresh_name(x, free_names(c1) | free_names(c2))
            return type_conv(subst1(c1, x, f), subst1(c2, y, f), env)
        case (TLam(x, d, body), _):
            return _eta_type(x, d, body, b, env)
        case (_, TLam(x, d, body)):
            return _eta_type(x, d, body, a, env)
        case TAppT(f1, a1), TAppT(f2, a2):
            return type_conv(f1, f2, env) and type_conv(a1, a2, env)
        case TAppTm(f1, a1), TAppTm(f2, a2):
            return type_conv(f1, f2, env) and term_conv(a1, a2, env)
        case TEq(l1, r1), TEq(l2, r2):
            return term_conv(l1, l2, env) and term_conv(r1, r2, env)
        case (TCast(s1, t1), TCast(s2, t2)) | (TTpEq(s1, t1), TTpEq(s2, t2)):
            return type_conv(s1, s2, env) and type_conv(t1, t2, env)
        case TMu(f1), TMu(f2):
            return type_conv(f1, f2, env)
        case _:
            return False


def _eta_type(x, dom, body, other: CoreType, env: ConvEnv) -> bool:
    f = fresh_name(x, free_names(body) | free_names(other))
    if _is_kind(dom):
        applied = TAppT(other, TVar(f))
    else:
        applied = TAppTm(other, Var(f))
    return type_conv(subst1(body, x, f), applied, env)


def _classifier_conv(a, b, env) -> bool:
    if _is_kind(a) != _is_kind(b):
        return False
    if _is_kind(a):
        return kind_conv(a, b, env)
    return type_conv(a, b, env)


def kind_conv(a: Kind, b: Kind, env: ConvEnv) -> bool:
    match a, b:
        case KStar(), KStar():
            return True
        case KPi(x, d1, c1), KPi(y, d2, c2):
            if not _classifier_conv(d1, d2, env):
                return False
            f = fresh_name(x, free_names(c1) | free_names(c2))
            return kind_conv(subst1(c1, x, f), subst1(c2, y, f), env)
        case _:
            return False


# ---------------------------------------------------------------------------
# separation of distinct normal forms

HOLE = PVar("#hole")


def plug(ctx: PureTerm, t: PureTerm) -> PureTerm:
    return subst1(ctx, "#hole", t)


@dataclass(frozen=True)
class SepResult:
    """Outcome of a separation attempt.

    When separated, `ctx` is a context over the *closures* of the inputs:
    `apply_context` builds the closing lambda prefix and plugs it in, and
    running the result on either input yields the two boolean combinators.
    `fvs` records the closing order.
    """

    status: str  # "separated" | "equal" | "unknown"
    ctx: Optional[PureTerm] = None
    fvs: tuple = ()


def apply_context(sep: SepResult, t: PureTerm) -> PureTerm:
    closed = t
    for v in reversed(sep.fvs):
        closed = PLam(v, closed)
    return plug(sep.ctx, closed)


def bohm_separate(a: PureTerm, b: PureTerm, fuel: int = 100000) -> SepResult:
    """Decide separability of two normalized erased terms.

    On success the returned context C satisfies C[a] ~> \\t.\\f.t and
    C[b] ~> \\t.\\f.f; the result is validated by running both before being
    reported, so "separated" is always trustworthy and failures degrade to
    "unknown".
    """
    norm = Normalizer(fuel=fuel)
    try:
        a = norm.normalize(a)
        b = norm.normalize(b)
    except FuelExhausted:
        return SepResult("unknown")
    if alpha_eq(a, b):
        return SepResult("equal")
    fvs = tuple(sorted(free_names(a) | free_names(b)))
    ac, bc = a, b
    for v in reversed(fvs):
        ac, bc = PLam(v, ac), PLam(v, bc)
    try:
        ctx = _separate_loop(ac, bc, Normalizer(fuel=fuel))
    except FuelExhausted:
        return SepResult("unknown")
    if ctx is None:
        return SepResult("unknown")
    # leftover experiment variables can be anything closed
    leftovers = free_names(ctx) - {"#hole"}
    if leftovers:
        ctx = subst(ctx, {v: PLam("z", PVar("z")) for v in leftovers})
    res = SepResult("separated", ctx, fvs)
    try:
        check = Normalizer(fuel=fuel)
        if not alpha_eq(check.normalize(apply_context(res, a)), TRUE):
            return SepResult("unknown")
        if not alpha_eq(check.normalize(apply_context(res, b)), FALSE):
            return SepResult("unknown")
    except FuelExhausted:
        return SepResult("unknown")
    return res


MAX_ROUNDS = 64


def _separate_loop(a: PureTerm, b: PureTerm, norm: Normalizer) -> Optional[PureTerm]:
    ctx = HOLE
    counter = [0]

    def freshv(tag: str) -> str:
        counter[0] += 1
        return f"#{tag}{counter[0]}"

    a = norm.normalize(a)
    b = norm.normalize(b)
    for _ in range(MAX_ROUNDS):
        if alpha_eq(a, TRUE) and alpha_eq(b, FALSE):
            return ctx

        if isinstance(a, PLam) or isinstance(b, PLam):
            v = freshv("h")
            ctx = plug(PApp(HOLE, PVar(v)), ctx)
            a = norm.normalize(PApp(a, PVar(v)))
            b = norm.normalize(PApp(b, PVar(v)))
            continue

        ha, aargs = _var_spine(a)
        hb, bargs = _var_spine(b)

        if isinstance(a, PCtor) and isinstance(b, PCtor):
            if a.name != b.name or len(a.args) != len(b.args):
                # arm selection is arity-aware, so same-name forms of
                # different arity still discriminate
                arms = (
                    PArm(a.name, tuple(freshv("w") for _ in a.args), TRUE),
                    PArm(b.name, tuple(freshv("w") for _ in b.args), FALSE),
                )
                ctx = plug(PCase(HOLE, arms), ctx)
                a, b = TRUE, FALSE
                continue
            i = _first_diff(a.args, b.args)
            if i is None:
                return None
            ws = tuple(freshv("w") for _ in a.args)
            ctx = plug(PCase(HOLE, (PArm(a.name, ws, PVar(ws[i])),)), ctx)
            a, b = a.args[i], b.args[i]
            continue

        if isinstance(a, PCtor) and hb is not None:
            assignment = _const_fn(len(bargs), PCtor("#k", ()), freshv)
            a, b, ctx = _assign(hb, assignment, a, b, ctx, norm)
            continue
        if isinstance(b, PCtor) and ha is not None:
            assignment = _const_fn(len(aargs), PCtor("#k", ()), freshv)
            a, b, ctx = _assign(ha, assignment, a, b, ctx, norm)
            continue

        if ha is not None and hb is not None:
            if ha != hb:
                a, b, ctx = _assign(ha, _const_fn(len(aargs), TRUE, freshv), a, b, ctx, norm)
                a, b, ctx = _assign(hb, _const_fn(len(bargs), FALSE, freshv), a, b, ctx, norm)
                continue
            if len(aargs) != len(bargs):
                k = max(len(aargs), len(bargs)) + 1
                sel = _selector(k, k - 1, freshv)
                a, b, ctx = _assign(ha, sel, a, b, ctx, norm)
                continue
            i = _first_diff(aargs, bargs)
            if i is None:
                return None
            if all(ha not in free_names(x) for x in aargs + bargs):
                a, b, ctx = _assign(ha, _selector(len(aargs), i, freshv), a, b, ctx, norm)
                continue
            # the head occurs inside its own arguments: tuple them first so
            # the next round sees a fresh head that can be replaced safely
            ws = [freshv("w") for _ in range(len(aargs))]
            cont = freshv("c")
            body = PVar(cont)
            for w in ws:
                body = PApp(body, PVar(w))
            tupler = _lam_chain(ws + [cont], body)
            a, b, ctx = _assign(ha, tupler, a, b, ctx, norm)
            continue

        return None
    return None


def _lam_chain(vs, body) -> PureTerm:
    for v in reversed(vs):
        body = PLam(v, body)
    return body


def _const_fn(arity: int, result: PureTerm, freshv) -> PureTerm:
    return _lam_chain([freshv("w") for _ in range(arity)], result)


def _selector(arity: int, idx: int, freshv) -> PureTerm:
    vs = [freshv("w") for _ in range(arity)]
    return _lam_chain(vs, PVar(vs[idx]))


def _assign(var: str, value: PureTerm, a, b, ctx, norm):
    ctx = subst1(ctx, var, value)
    a = norm.normalize(subst1(a, var, value))
    b = norm.normalize(subst1(b, var, value))
    return a, b, ctx


def _var_spine(t: PureTerm):
    args = []
    while isinstance(t, PApp):
        args.append(t.arg)
        t = t.fn
    if isinstance(t, PVar):
        return t.name, list(reversed(args))
    return None, []


def _first_diff(xs, ys) -> Optional[int]:
    for i, (x, y) in enumerate(zip(xs, ys)):
        if not alpha_eq(x, y):
            return i
    return None
