"""Core representation: erased terms, annotated terms, types and kinds.

Definitional equality in this theory is judged on erasures, so the erased
fragment gets its own small syntax (`PureTerm`) that the normalizer can run
directly: variables, lambdas, applications, saturated constructor forms and
case trees (plain and recursive).

Annotated terms (`CoreTerm`) carry the typed apparatus the checker needs;
`erase` forgets all of it.  Types (`CoreType`) embed annotated terms in
equality types and in term-index positions; those embedded terms are always
*compared* via erasure but *stored* annotated so that motive substitution
stays uniform.

Term variables and type variables live in one shared name space.  A single
generic `subst` walks all three sorts; mapping values are terms, types, or
bare strings (a string means "rename to this name", which sidesteps having
to know the sort of a freshened binder).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

# ---------------------------------------------------------------------------
# erased terms


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PLam:
    var: str
    body: "PureTerm"


@dataclass(frozen=True)
class PApp:
    fn: "PureTerm"
    arg: "PureTerm"


@dataclass(frozen=True)
class PCtor:
    """Constructor applied to its relevant arguments so far."""

    name: str
    args: tuple


@dataclass(frozen=True)
class PArm:
    ctor: str
    vars: tuple  # names for the constructor's relevant arguments
    body: "PureTerm"


@dataclass(frozen=True)
class PCase:
    scrut: "PureTerm"
    arms: tuple


@dataclass(frozen=True)
class PFix:
    """Recursive function that case-splits on its argument.

    `fn` is in scope in every arm body (it denotes the whole PFix); `var`
    names the scrutinee argument.
    """

    fn: str
    var: str
    arms: tuple


PureTerm = Union[PVar, PLam, PApp, PCtor, PCase, PFix]


def papp(fn: PureTerm, arg: PureTerm) -> PureTerm:
    """Application that lets constructor forms absorb their arguments."""
    if isinstance(fn, PCtor):
        return PCtor(fn.name, fn.args + (arg,))
    return PApp(fn, arg)


def papps(fn: PureTerm, args) -> PureTerm:
    for a in args:
        fn = papp(fn, a)
    return fn


# ---------------------------------------------------------------------------
# annotated terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    var: str
    ann: Optional["CoreType"]
    body: "CoreTerm"


@dataclass(frozen=True)
class LamI:
    """Erased abstraction: binds a type variable (kind annotation) or an
    erased term variable (type annotation).  The bound variable must not
    survive into the body's erasure; the checker enforces that."""

    var: str
    ann: Union["CoreType", "Kind", None]
    body: "CoreTerm"


@dataclass(frozen=True)
class App:
    fn: "CoreTerm"
    arg: "CoreTerm"


@dataclass(frozen=True)
class AppI:
    """Erased term application `f -a`."""

    fn: "CoreTerm"
    arg: "CoreTerm"


@dataclass(frozen=True)
class AppT:
    """Type application `f [T]`."""

    fn: "CoreTerm"
    ty: "CoreType"


@dataclass(frozen=True)
class Beta:
    """Reflexivity for the untyped equality; erases to the identity."""


@dataclass(frozen=True)
class Delta:
    """From a proof equating two separable erasures, conclude anything."""

    prf: "CoreTerm"


@dataclass(frozen=True)
class Phi:
    """Cast `shadow` to the type of `main`, given a proof their erasures
    agree.  Erases to the erasure of `shadow`."""

    eq: "CoreTerm"
    main: "CoreTerm"
    shadow: "CoreTerm"


@dataclass(frozen=True)
class Rho:
    """Transport along an equality: given eq : {a ~ b} and body checked at
    motive[var := a], produce motive[var := b]."""

    eq: "CoreTerm"
    var: str
    motive: "CoreType"
    body: "CoreTerm"


@dataclass(frozen=True)
class IntrCast:
    """Build a coercion witness from fn : S -> T and a proof that fn is
    pointwise the identity on erasures.  Both components are erased."""

    fn: "CoreTerm"
    prf: "CoreTerm"


@dataclass(frozen=True)
class CastElim:
    """Apply a coercion witness; erases to the identity."""

    cast: "CoreTerm"


@dataclass(frozen=True)
class IntrTpEq:
    """Build a type equivalence from coercions in both directions."""

    fwd: "CoreTerm"
    bwd: "CoreTerm"


@dataclass(frozen=True)
class TpEq1:
    """Forward direction of a type equivalence; erases to the identity."""

    prf: "CoreTerm"


@dataclass(frozen=True)
class TpEq2:
    """Backward direction of a type equivalence; erases to the identity."""

    prf: "CoreTerm"


@dataclass(frozen=True)
class Builtin:
    """One of the recursive-type primitives: "in", "out" or "ind".

    Each is used applied first to an erased monotonicity witness, from whose
    type the checker recovers the underlying type scheme.
    """

    name: str


@dataclass(frozen=True)
class BranchVar:
    name: str
    marker: str  # "term" | "erased" | "type"


@dataclass(frozen=True)
class Branch:
    """One arm of a match: binds the constructor's argument variables and
    one equation variable per term index of the scrutinee's type."""

    ctor: str
    vars: tuple  # tuple[BranchVar, ...]
    eqs: tuple  # tuple[str, ...]
    body: "CoreTerm"


@dataclass(frozen=True)
class Motive:
    """Dependent result type of a match, abstracting the scrutinee's term
    indices and the scrutinee itself."""

    ivars: tuple  # tuple[str, ...]
    svar: str
    body: "CoreType"


@dataclass(frozen=True)
class Match:
    scrut: "CoreTerm"
    motive: Optional[Motive]
    branches: tuple


@dataclass(frozen=True)
class Fix:
    """Recursive function over one datatype argument; structurally smaller
    calls only.  The motive plays the same role as for Match."""

    fn: str
    var: str
    motive: Motive
    branches: tuple


CoreTerm = Union[
    Var, Lam, LamI, App, AppI, AppT, Beta, Delta, Phi, Rho,
    IntrCast, CastElim, IntrTpEq, TpEq1, TpEq2, Builtin, Match, Fix,
]

# ---------------------------------------------------------------------------
# types and kinds


@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TPi:
    var: str
    dom: "CoreType"
    cod: "CoreType"


@dataclass(frozen=True)
class TAll:
    """Erased quantifier: over types when dom is a Kind, over erased term
    arguments when dom is a CoreType."""

    var: str
    dom: Union["CoreType", "Kind"]
    cod: "CoreType"


@dataclass(frozen=True)
class TLam:
    var: str
    dom: Union["CoreType", "Kind"]
    body: "CoreType"


@dataclass(frozen=True)
class TAppT:
    fn: "CoreType"
    arg: "CoreType"


@dataclass(frozen=True)
class TAppTm:
    fn: "CoreType"
    arg: "CoreTerm"


@dataclass(frozen=True)
class TEq:
    """Untyped equality of erasures; endpoints are only scope-checked."""

    lhs: "CoreTerm"
    rhs: "CoreTerm"


@dataclass(frozen=True)
class TCast:
    src: "CoreType"
    dst: "CoreType"


@dataclass(frozen=True)
class TTpEq:
    src: "CoreType"
    dst: "CoreType"


@dataclass(frozen=True)
class TMu:
    """Least fixed point of a type scheme of kind * -> *."""

    fam: "CoreType"


CoreType = Union[TVar, TPi, TAll, TLam, TAppT, TAppTm, TEq, TCast, TTpEq, TMu]


@dataclass(frozen=True)
class KStar:
    pass


@dataclass(frozen=True)
class KPi:
    var: str
    dom: Union["CoreType", "Kind"]
    cod: "Kind"


Kind = Union[KStar, KPi]

Node = Union[PureTerm, CoreTerm, CoreType, Kind]


def arrow(dom: CoreType, cod: CoreType) -> CoreType:
    return TPi("_", dom, cod)


def karrow(dom, cod: Kind) -> Kind:
    return KPi("_", dom, cod)


def timpl(dom: CoreType, cod: CoreType) -> CoreType:
    """`dom => cod`: erased unnamed term quantifier."""
    return TAll("_", dom, cod)


# ---------------------------------------------------------------------------
# erasure

ID = PLam("x", PVar("x"))


def erase(t: CoreTerm) -> PureTerm:
    match t:
        case Var(x):
            return PVar(x)
        case Lam(x, _, body):
            return PLam(x, erase(body))
        case LamI(_, _, body):
            return erase(body)
        case App(fn, arg):
            return papp(erase(fn), erase(arg))
        case AppI(fn, _) | AppT(fn, _):
            return erase(fn)
        case Beta() | Delta(_) | IntrCast(_, _) | CastElim(_) | IntrTpEq(_, _) | TpEq1(_) | TpEq2(_):
            return ID
        case Phi(_, _, shadow):
            return erase(shadow)
        case Rho(_, _, _, body):
            return erase(body)
        case Builtin("in"):
            return PCtor("in", ())
        case Builtin(name):
            return PVar(name)
        case Match(scrut, _, branches):
            return PCase(erase(scrut), tuple(_erase_arm(b) for b in branches))
        case Fix(fn, var, _, branches):
            return PFix(fn, var, tuple(_erase_arm(b) for b in branches))
    raise TypeError(f"not a core term: {t!r}")


def _erase_arm(b: Branch) -> PArm:
    names = tuple(v.name for v in b.vars if v.marker == "term")
    return PArm(b.ctor, names, erase(b.body))


# ---------------------------------------------------------------------------
# free names

def free_names(node: Node) -> frozenset:
    """All free identifiers of a term, type or kind, both sorts pooled."""
    match node:
        case PVar(x) | Var(x) | TVar(x):
            return frozenset((x,))
        case PLam(x, body):
            return free_names(body) - {x}
        case PApp(fn, arg) | App(fn, arg) | AppI(fn, arg):
            return free_names(fn) | free_names(arg)
        case PCtor(_, args):
            out = frozenset()
            for a in args:
                out |= free_names(a)
            return out
        case PCase(scrut, arms):
            out = free_names(scrut)
            for a in arms:
                out |= free_names(a.body) - set(a.vars)
            return out
        case PFix(fn, var, arms):
            out = frozenset()
            for a in arms:
                out |= free_names(a.body) - set(a.vars)
            return out - {fn, var}
        case PArm(_, vars, body):
            return free_names(body) - set(vars)
        case Lam(x, ann, body) | LamI(x, ann, body) | TLam(x, ann, body):
            out = free_names(body) - {x}
            return out | (free_names(ann) if ann is not None else frozenset())
        case AppT(fn, ty):
            return free_names(fn) | free_names(ty)
        case Beta() | Builtin(_) | KStar():
            return frozenset()
        case Delta(prf) | TpEq1(prf) | TpEq2(prf) | CastElim(prf):
            return free_names(prf)
        case Phi(eq, main, shadow):
            return free_names(eq) | free_names(main) | free_names(shadow)
        case Rho(eq, var, motive, body):
            return free_names(eq) | (free_names(motive) - {var}) | free_names(body)
        case IntrCast(a, b) | IntrTpEq(a, b):
            return free_names(a) | free_names(b)
        case Match(scrut, motive, branches):
            out = free_names(scrut)
            if motive is not None:
                out |= free_names(motive.body) - set(motive.ivars) - {motive.svar}
            for b in branches:
                out |= _branch_free(b)
            return out
        case Fix(fn, var, motive, branches):
            out = free_names(motive.body) - set(motive.ivars) - {motive.svar}
            inner = frozenset()
            for b in branches:
                inner |= _branch_free(b)
            return out | (inner - {fn, var})
        case TPi(x, dom, cod) | TAll(x, dom, cod) | KPi(x, dom, cod):
            return free_names(dom) | (free_names(cod) - {x})
        case TAppT(fn, arg) | TAppTm(fn, arg) | TEq(fn, arg) | TCast(fn, arg) | TTpEq(fn, arg):
            return free_names(fn) | free_names(arg)
        case TMu(fam):
            return free_names(fam)
    raise TypeError(f"free_names: unknown node {node!r}")


def _branch_free(b: Branch) -> frozenset:
    bound = {v.name for v in b.vars} | set(b.eqs)
    return free_names(b.body) - bound


def fresh_name(base: str, taken) -> str:
    while base in taken:
        base = base + "'"
    return base


# ---------------------------------------------------------------------------
# substitution

Mapping = dict  # str -> CoreTerm | CoreType | str


def _value_free(v) -> frozenset:
    if isinstance(v, str):
        return frozenset((v,))
    return free_names(v)


def _under(names: tuple, mapping: Mapping, *parts):
    """Substitute into `parts` under binders `names`, freshening as needed.

    Returns (new_names, new_parts)."""
    m = {k: v for k, v in mapping.items() if k not in names}
    if not m:
        return names, parts
    avoid = set(m)
    for v in m.values():
        avoid |= _value_free(v)
    taken = set(avoid) | set(names)
    for p in parts:
        if p is not None:
            taken |= free_names(p)
    out = []
    for n in names:
        if n in avoid:
            f = fresh_name(n, taken)
            taken.add(f)
            m[n] = f
            out.append(f)
        else:
            out.append(n)
    parts2 = tuple(subst(p, m) if p is not None else None for p in parts)
    return tuple(out), parts2


def subst(node, mapping: Mapping):
    """Capture-avoiding parallel substitution over any sort.

    Mapping values may be terms (replacing term variables), types
    (replacing type variables) or strings (renaming either sort).
    """
    if not mapping:
        return node
    match node:
        case PVar(x) | Var(x) | TVar(x):
            v = mapping.get(x)
            if v is None:
                return node
            if isinstance(v, str):
                return type(node)(v)
            return v  # caller guarantees the sort lines up
        case PLam(x, body):
            (x2,), (b2,) = _under((x,), mapping, body)
            return PLam(x2, b2)
        case PApp(fn, arg):
            return PApp(subst(fn, mapping), subst(arg, mapping))
        case PCtor(name, args):
            return PCtor(name, tuple(subst(a, mapping) for a in args))
        case PCase(scrut, arms):
            return PCase(subst(scrut, mapping), tuple(_subst_parm(a, mapping) for a in arms))
        case PFix(fn, var, arms):
            m = {k: v for k, v in mapping.items() if k not in (fn, var)}
            if not m:
                return node
            avoid = set(m)
            for v in m.values():
                avoid |= _value_free(v)
            taken = avoid | {fn, var}
            for a in arms:
                taken |= free_names(a)
            fn2, var2 = fn, var
            if fn in avoid:
                fn2 = fresh_name(fn, taken)
                taken.add(fn2)
                m[fn] = fn2
            if var in avoid:
                var2 = fresh_name(var, taken)
                taken.add(var2)
                m[var] = var2
            return PFix(fn2, var2, tuple(_subst_parm(a, m) for a in arms))
        case Lam(x, ann, body):
            ann2 = subst(ann, mapping) if ann is not None else None
            (x2,), (b2,) = _under((x,), mapping, body)
            return Lam(x2, ann2, b2)
        case LamI(x, ann, body):
            ann2 = subst(ann, mapping) if ann is not None else None
            (x2,), (b2,) = _under((x,), mapping, body)
            return LamI(x2, ann2, b2)
        case App(fn, arg):
            return App(subst(fn, mapping), subst(arg, mapping))
        case AppI(fn, arg):
            return AppI(subst(fn, mapping), subst(arg, mapping))
        case AppT(fn, ty):
            return AppT(subst(fn, mapping), subst(ty, mapping))
        case Beta() | Builtin(_) | KStar():
            return node
        case Delta(prf):
            return Delta(subst(prf, mapping))
        case Phi(eq, main, shadow):
            return Phi(subst(eq, mapping), subst(main, mapping), subst(shadow, mapping))
        case Rho(eq, var, motive, body):
            eq2 = subst(eq, mapping)
            body2 = subst(body, mapping)
            (v2,), (m2,) = _under((var,), mapping, motive)
            return Rho(eq2, v2, m2, body2)
        case IntrCast(fn, prf):
            return IntrCast(subst(fn, mapping), subst(prf, mapping))
        case CastElim(c):
            return CastElim(subst(c, mapping))
        case IntrTpEq(fwd, bwd):
            return IntrTpEq(subst(fwd, mapping), subst(bwd, mapping))
        case TpEq1(prf):
            return TpEq1(subst(prf, mapping))
        case TpEq2(prf):
            return TpEq2(subst(prf, mapping))
        case Match(scrut, motive, branches):
            scrut2 = subst(scrut, mapping)
            motive2 = _subst_motive(motive, mapping)
            return Match(scrut2, motive2, tuple(_subst_branch(b, mapping) for b in branches))
        case TPi(x, dom, cod):
            dom2 = subst(dom, mapping)
            (x2,), (c2,) = _under((x,), mapping, cod)
            return TPi(x2, dom2, c2)
        case TAll(x, dom, cod):
            dom2 = subst(dom, mapping)
            (x2,), (c2,) = _under((x,), mapping, cod)
            return TAll(x2, dom2, c2)
        case TLam(x, dom, body):
            dom2 = subst(dom, mapping)
            (x2,), (b2,) = _under((x,), mapping, body)
            return TLam(x2, dom2, b2)
        case TAppT(fn, arg):
            return TAppT(subst(fn, mapping), subst(arg, mapping))
        case TAppTm(fn, arg):
            return TAppTm(subst(fn, mapping), subst(arg, mapping))
        case TEq(lhs, rhs):
            return TEq(subst(lhs, mapping), subst(rhs, mapping))
        case TCast(src, dst):
            return TCast(subst(src, mapping), subst(dst, mapping))
        case TTpEq(src, dst):
            return TTpEq(subst(src, mapping), subst(dst, mapping))
        case TMu(fam):
            return TMu(subst(fam, mapping))
        case KPi(x, dom, cod):
            dom2 = subst(dom, mapping)
            (x2,), (c2,) = _under((x,), mapping, cod)
            return KPi(x2, dom2, c2)
        case Fix(fn, var, motive, branches):
            # fn and var scope over every branch body; the motive binds its
            # own index and scrutinee names.
            motive2 = _subst_motive(motive, mapping)
            m = {k: v for k, v in mapping.items() if k not in (fn, var)}
            if not m:
                return Fix(fn, var, motive2, branches)
            avoid = set(m)
            for v in m.values():
                avoid |= _value_free(v)
            taken = avoid | {fn, var}
            for b in branches:
                taken |= _branch_free(b)
            fn2, var2 = fn, var
            if fn in avoid:
                fn2 = fresh_name(fn, taken)
                taken.add(fn2)
                m[fn] = fn2
            if var in avoid:
                var2 = fresh_name(var, taken)
                taken.add(var2)
                m[var] = var2
            return Fix(fn2, var2, motive2, tuple(_subst_branch(b, m) for b in branches))
    raise TypeError(f"subst: unknown node {node!r}")


def _subst_parm(a: PArm, mapping: Mapping) -> PArm:
    vs, (b2,) = _under(a.vars, mapping, a.body)
    return PArm(a.ctor, vs, b2)


def _subst_motive(m: Optional[Motive], mapping: Mapping) -> Optional[Motive]:
    if m is None:
        return None
    names = m.ivars + (m.svar,)
    names2, (b2,) = _under(names, mapping, m.body)
    return Motive(names2[:-1], names2[-1], b2)


def _subst_branch(b: Branch, mapping: Mapping) -> Branch:
    names = tuple(v.name for v in b.vars) + b.eqs
    names2, (body2,) = _under(names, mapping, b.body)
    vs = tuple(BranchVar(n, v.marker) for n, v in zip(names2, b.vars))
    return Branch(b.ctor, vs, names2[len(b.vars):], body2)


def subst1(node, name: str, value):
    return subst(node, {name: value})


# ---------------------------------------------------------------------------
# alpha equality

def alpha_eq(a: Node, b: Node) -> bool:
    return _aeq(a, b, {}, {}, 0)


def _aeq(a, b, la: dict, rb: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False

    def var_eq(x, y):
        dx, dy = la.get(x), rb.get(y)
        if dx is None and dy is None:
            return x == y
        return dx == dy

    def go_under(names_a, names_b, pairs):
        if len(names_a) != len(names_b):
            return False
        la2, rb2, d = dict(la), dict(rb), depth
        for x, y in zip(names_a, names_b):
            la2[x] = d
            rb2[y] = d
            d += 1
        return all(_aeq(pa, pb, la2, rb2, d) for pa, pb in pairs)

    match a, b:
        case (PVar(x), PVar(y)) | (Var(x), Var(y)) | (TVar(x), TVar(y)):
            return var_eq(x, y)
        case (PLam(x, ba), PLam(y, bb)):
            return go_under((x,), (y,), [(ba, bb)])
        case (PApp(f1, a1), PApp(f2, a2)) | (App(f1, a1), App(f2, a2)) | (AppI(f1, a1), AppI(f2, a2)):
            return _aeq(f1, f2, la, rb, depth) and _aeq(a1, a2, la, rb, depth)
        case (PCtor(n1, as1), PCtor(n2, as2)):
            return n1 == n2 and len(as1) == len(as2) and all(
                _aeq(x, y, la, rb, depth) for x, y in zip(as1, as2))
        case (PCase(s1, arms1), PCase(s2, arms2)):
            if not _aeq(s1, s2, la, rb, depth) or len(arms1) != len(arms2):
                return False
            return all(
                a1.ctor == a2.ctor and go_under(a1.vars, a2.vars, [(a1.body, a2.body)])
                for a1, a2 in zip(arms1, arms2))
        case (PFix(f1, x1, arms1), PFix(f2, x2, arms2)):
            if len(arms1) != len(arms2):
                return False
            la2, rb2 = {**la, f1: depth, x1: depth + 1}, {**rb, f2: depth, x2: depth + 1}
            return all(
                a1.ctor == a2.ctor
                and _aeq_arm(a1, a2, la2, rb2, depth + 2)
                for a1, a2 in zip(arms1, arms2))
        case (Lam(x, n1, b1), Lam(y, n2, b2)) | (LamI(x, n1, b1), LamI(y, n2, b2)) | (TLam(x, n1, b1), TLam(y, n2, b2)):
            if (n1 is None) != (n2 is None):
                return False
            if n1 is not None and not _aeq(n1, n2, la, rb, depth):
                return False
            return go_under((x,), (y,), [(b1, b2)])
        case (AppT(f1, t1), AppT(f2, t2)):
            return _aeq(f1, f2, la, rb, depth) and _aeq(t1, t2, la, rb, depth)
        case (Beta(), Beta()) | (KStar(), KStar()):
            return True
        case (Builtin(n1), Builtin(n2)):
            return n1 == n2
        case (Delta(p1), Delta(p2)) | (TpEq1(p1), TpEq1(p2)) | (TpEq2(p1), TpEq2(p2)) | (CastElim(p1), CastElim(p2)):
            return _aeq(p1, p2, la, rb, depth)
        case (Phi(e1, m1, s1), Phi(e2, m2, s2)):
            return all(_aeq(x, y, la, rb, depth) for x, y in ((e1, e2), (m1, m2), (s1, s2)))
        case (Rho(e1, v1, mo1, b1), Rho(e2, v2, mo2, b2)):
            return (_aeq(e1, e2, la, rb, depth)
                    and _aeq(b1, b2, la, rb, depth)
                    and go_under((v1,), (v2,), [(mo1, mo2)]))
        case (IntrCast(f1, p1), IntrCast(f2, p2)) | (IntrTpEq(f1, p1), IntrTpEq(f2, p2)):
            return _aeq(f1, f2, la, rb, depth) and _aeq(p1, p2, la, rb, depth)
        case (Match(s1, m1, bs1), Match(s2, m2, bs2)):
            if not _aeq(s1, s2, la, rb, depth) or len(bs1) != len(bs2):
                return False
            if (m1 is None) != (m2 is None):
                return False
            if m1 is not None:
                if not go_under(m1.ivars + (m1.svar,), m2.ivars + (m2.svar,), [(m1.body, m2.body)]):
                    return False
            return all(_aeq_branch(b1, b2, la, rb, depth) for b1, b2 in zip(bs1, bs2))
        case (Fix(f1, x1, m1, bs1), Fix(f2, x2, m2, bs2)):
            if len(bs1) != len(bs2):
                return False
            if not go_under(m1.ivars + (m1.svar,), m2.ivars + (m2.svar,), [(m1.body, m2.body)]):
                return False
            la2, rb2 = {**la, f1: depth, x1: depth + 1}, {**rb, f2: depth, x2: depth + 1}
            return all(_aeq_branch(b1, b2, la2, rb2, depth + 2) for b1, b2 in zip(bs1, bs2))
        case (TPi(x, d1, c1), TPi(y, d2, c2)) | (TAll(x, d1, c1), TAll(y, d2, c2)) | (KPi(x, d1, c1), KPi(y, d2, c2)):
            return _aeq(d1, d2, la, rb, depth) and go_under((x,), (y,), [(c1, c2)])
        case (TAppT(f1, a1), TAppT(f2, a2)) | (TAppTm(f1, a1), TAppTm(f2, a2)) | (TEq(f1, a1), TEq(f2, a2)) | (TCast(f1, a1), TCast(f2, a2)) | (TTpEq(f1, a1), TTpEq(f2, a2)):
            return _aeq(f1, f2, la, rb, depth) and _aeq(a1, a2, la, rb, depth)
        case (TMu(f1), TMu(f2)):
            return _aeq(f1, f2, la, rb, depth)
    return False


def _aeq_arm(a1: PArm, a2: PArm, la, rb, depth) -> bool:
    if len(a1.vars) != len(a2.vars):
        return False
    la2, rb2, d = dict(la), dict(rb), depth
    for x, y in zip(a1.vars, a2.vars):
        la2[x] = d
        rb2[y] = d
        d += 1
    return _aeq(a1.body, a2.body, la2, rb2, d)


def _aeq_branch(b1: Branch, b2: Branch, la, rb, depth) -> bool:
    if b1.ctor != b2.ctor or len(b1.vars) != len(b2.vars) or len(b1.eqs) != len(b2.eqs):
        return False
    if any(v1.marker != v2.marker for v1, v2 in zip(b1.vars, b2.vars)):
        return False
    la2, rb2, d = dict(la), dict(rb), depth
    for v1, v2 in zip(b1.vars + tuple(BranchVar(e, "erased") for e in b1.eqs),
                      b2.vars + tuple(BranchVar(e, "erased") for e in b2.eqs)):
        la2[v1.name] = d
        rb2[v2.name] = d
        d += 1
    return _aeq(b1.body, b2.body, la2, rb2, d)


# ---------------------------------------------------------------------------
# spine helpers

def split_app(t: CoreTerm):
    """Unwind an application spine to (head, [(marker, arg)])."""
    args = []
    while True:
        match t:
            case App(fn, a):
                args.append(("term", a))
                t = fn
            case AppI(fn, a):
                args.append(("erased", a))
                t = fn
            case AppT(fn, ty):
                args.append(("type", ty))
                t = fn
            case _:
                return t, list(reversed(args))


def mk_app(head: CoreTerm, args) -> CoreTerm:
    for marker, a in args:
        match marker:
            case "term":
                head = App(head, a)
            case "erased":
                head = AppI(head, a)
            case "type":
                head = AppT(head, ty=a)
            case _:
                raise ValueError(marker)
    return head


def split_tapp(ty: CoreType):
    args = []
    while True:
        match ty:
            case TAppT(fn, a):
                args.append(("type", a))
                ty = fn
            case TAppTm(fn, a):
                args.append(("term", a))
                ty = fn
            case _:
                return ty, list(reversed(args))


def mk_tapp(head: CoreType, args) -> CoreType:
    for marker, a in args:
        head = TAppT(head, a) if marker == "type" else TAppTm(head, a)
    return head
