"""Simulated type-level computation.

A `typefun` looks like a recursive type-level function, but the kernel has
no such thing: type-level reduction is substitution only.  This module
compiles each `typefun` into artifacts the kernel does accept:

  * a relation datatype connecting the matched index to candidate result
    types, one constructor per clause, GADT-style,
  * a canonical result type quantifying over that relation,
  * respectfulness and uniqueness lemmas showing the relation is
    functional, plus an existence witness,
  * per-clause computation laws: type equalities between the canonical
    type at a constructor pattern and the clause right-hand side, whose
    coercions erase to the identity function.

`algfold` does the same once, generically, for one recursive layer over
any monotone scheme, given a type algebra and a respectfulness witness
for that algebra.

Everything generated here goes through the ordinary kernel entry points,
so a generation bug surfaces as a kernel error, never as an unsound
declaration.  Failures roll the context back: a declaration lands whole
or not at all.
"""

from dataclasses import dataclass, field

from .core import (
    App, AppI, AppT, Beta, Branch, BranchVar, Builtin, CastElim, Delta, Fix,
    IntrCast, IntrTpEq, KPi, KStar, Lam, LamI, Match, Motive, Rho, TAll,
    TAppT, TAppTm, TCast, TEq, TLam, TMu, TPi, TTpEq, TVar, TpEq1, TpEq2,
    Var, alpha_eq, free_names, fresh_name, split_app, split_tapp, subst,
    subst1,
)
from .conversion import kind_conv, type_conv
from .kernel import (
    Context, TypingError, _kind_telescope, data_spine, declare_data,
    declare_def, declare_typedef,
)
from .prelude import CONGRUENCES
from .surface import AlgfoldDecl, DataDecl, DefDecl, TypeDecl, TypefunDecl

_TYPE_NODES = (TVar, TPi, TAll, TLam, TAppT, TAppTm, TEq, TCast, TTpEq, TMu)


class ElabError(Exception):
    """Rejection of a typefun or algfold, with a stable failure kind.

    kinds: relevant_occurrence, non_congruent_head, unsupported_match,
    clause_shape.
    """

    def __init__(self, kind: str, msg: str):
        super().__init__(f"{kind}: {msg}")
        self.kind = kind
        self.msg = msg


def _is_kind(x) -> bool:
    return isinstance(x, (KStar, KPi))


def _is_type(x) -> bool:
    return isinstance(x, _TYPE_NODES)


def _lc(name: str) -> str:
    """Lower a leading acronym: TVFold -> tvFold, Nary -> nary."""
    i = 0
    while i < len(name) and name[i].isupper():
        i += 1
    if i == 0:
        return name
    if i < len(name):
        i -= 1
    if i == 0:
        i = 1
    return name[:i].lower() + name[i:]


def _uc(name: str) -> str:
    return name[0].upper() + name[1:] if name else name


def _all_star_arity(k):
    """Arity of a kind * -> ... -> *; None for anything richer."""
    n = 0
    while isinstance(k, KPi):
        if not isinstance(k.dom, KStar):
            return None
        n += 1
        k = k.cod
    return n if isinstance(k, KStar) else None


def _tapp1(fn, arg):
    """One type-level application, beta-reducing a literal lambda."""
    if isinstance(fn, TLam):
        return subst1(fn.body, fn.var, arg)
    return TAppT(fn, arg) if _is_type(arg) else TAppTm(fn, arg)


def _eta_tlam(ty):
    match ty:
        case TLam(v, _, TAppTm(fn, Var(v2))) if v == v2 \
                and v not in free_names(fn):
            return fn
    return ty


def _ap(t, marker, v):
    if marker == "term":
        return App(t, v)
    if marker == "erased":
        return AppI(t, v)
    return AppT(t, v)


def _app_b(fn, arg):
    """Apply, beta-reducing a literal lambda so the result stays inferable."""
    if isinstance(fn, Lam):
        return subst1(fn.body, fn.var, arg)
    return App(fn, arg)


def _subst_beta(ty, mapping):
    """Substitution that beta-reduces where a family meets its argument.

    Used to replace induction-hypothesis placeholders by concrete type
    families without leaving literal redexes in emitted types.
    """
    match ty:
        case TVar(n):
            return mapping.get(n, ty)
        case TAppTm(fn, arg):
            return _tapp1(_subst_beta(fn, mapping), subst(arg, mapping))
        case TAppT(fn, arg):
            return _tapp1(_subst_beta(fn, mapping), _subst_beta(arg, mapping))
        case TPi(v, d, c):
            inner = {k: w for k, w in mapping.items() if k != v}
            return TPi(v, _subst_beta(d, mapping), _subst_beta(c, inner))
        case TAll(v, d, c):
            d2 = d if _is_kind(d) else _subst_beta(d, mapping)
            inner = {k: w for k, w in mapping.items() if k != v}
            return TAll(v, d2, _subst_beta(c, inner))
        case TLam(v, d, c):
            d2 = d if _is_kind(d) else _subst_beta(d, mapping)
            inner = {k: w for k, w in mapping.items() if k != v}
            return TLam(v, d2, _subst_beta(c, inner))
        case TEq(l, r):
            return TEq(subst(l, mapping), subst(r, mapping))
        case TCast(a, b):
            return TCast(_subst_beta(a, mapping), _subst_beta(b, mapping))
        case TTpEq(a, b):
            return TTpEq(_subst_beta(a, mapping), _subst_beta(b, mapping))
        case TMu(f):
            return TMu(_subst_beta(f, mapping))
    return ty


# ---------------------------------------------------------------------------
# digestion records

@dataclass(frozen=True)
class _Rem:
    """A non-matched index argument of a typefun."""

    name: str
    cls: object          # classifier template over i0 and earlier rems
    form: str            # "term" | "star" | "family"
    fvar: str = ""
    fdom: object = None


@dataclass(frozen=True)
class _Site:
    """One recursive use of the typefun inside a clause right-hand side."""

    rec: object          # matched-index argument at the site
    rems: tuple          # remaining-index arguments at the site
    ih: str              # induction-hypothesis placeholder
    fam: object = None   # (binder, dom) when the site varies over a binder


@dataclass
class _Clause:
    ctor: str
    binders: tuple       # ((name, marker, classifier), ...) unforced args
    forced: dict         # telescope var -> (value, path | None)
    pattern: object      # constructor applied at params and all args
    rhs: object          # right-hand side with index lambdas peeled
    sites: tuple
    rhs_ih: object       # rhs with sites replaced by their hypotheses
    relctor: str = ""


@dataclass
class _Typefun:
    name: str
    params: tuple
    kind: object
    i0: str
    i0cls: object
    dsig: object
    dpact: tuple
    diact: tuple
    rems: tuple
    clauses: tuple
    conds: tuple         # ((param, arity, witness var), ...)
    rel: str
    surface_clauses: tuple
    decls: list = field(default_factory=list)


@dataclass(frozen=True)
class _Link:
    """A variable that differs between the two sides of a bridge."""

    form: str            # "term" | "star" | "family"
    left: object
    right: object
    prf: object          # {l ~ r} | TpEq [l] [r] | pointwise function
    clsL: object = None
    clsR: object = None


@dataclass(frozen=True)
class _EqPrf:
    left: object
    right: object
    prf: object


# ---------------------------------------------------------------------------
# clause right-hand-side analysis

class _Walker:
    """Walks a clause right-hand side, lifting recursive uses into sites.

    Tracks whether the current position admits a congruence proof; a
    recursive use anywhere else is reported along with the blocking
    construct.
    """

    def __init__(self, name, params, i0, rems, relevant, namer):
        self.name = name
        self.params = dict(params)
        self.i0 = i0
        self.rems = rems
        self.relevant = set(relevant)
        self.namer = namer
        self.sites = []
        self.conds = set()

    def walk(self, ty, blocked, fam, locs):
        match ty:
            case TVar(n):
                if n == self.name:
                    raise ElabError(
                        "clause_shape",
                        f"recursive use of '{self.name}' must be fully "
                        f"applied")
                return ty
            case TPi(v, dom, cod):
                if v in free_names(cod):
                    b = "a dependent function type"
                    return TPi(v, self.walk(dom, b, None, locs),
                               self.walk(cod, b, None, locs | {v}))
                return TPi(v, self.walk(dom, blocked, fam, locs),
                           self.walk(cod, blocked, fam, locs))
            case TAll(v, dom, cod):
                b = "a quantifier"
                dom2 = dom if _is_kind(dom) else self.walk(dom, b, None, locs)
                return TAll(v, dom2, self.walk(cod, b, None, locs | {v}))
            case TLam(v, dom, body):
                b = "a type-level lambda"
                dom2 = dom if _is_kind(dom) else self.walk(dom, b, None, locs)
                return TLam(v, dom2, self.walk(body, b, None, locs | {v}))
            case TEq(l, r):
                self._embedded(l)
                self._embedded(r)
                return ty
            case TCast(a, b_):
                blk = "a Cast argument"
                return TCast(self.walk(a, blk, None, locs),
                             self.walk(b_, blk, None, locs))
            case TTpEq(a, b_):
                blk = "a TpEq argument"
                return TTpEq(self.walk(a, blk, None, locs),
                             self.walk(b_, blk, None, locs))
            case TMu(f):
                return TMu(self.walk(f, "a mu scheme", None, locs))
            case TAppT(_, _) | TAppTm(_, _):
                return self._spine(ty, blocked, fam, locs)
        return ty

    def _spine(self, ty, blocked, fam, locs):
        head, args = split_tapp(ty)
        if not isinstance(head, TVar):
            raise ElabError("clause_shape",
                            "unsupported type application head")
        h = head.name
        if h == self.name:
            return self._site(ty, args, blocked, fam, locs)
        if h in locs:
            return self._opaque(head, args, locs,
                                f"an application of the bound variable '{h}'")
        if h in self.params:
            arity = _all_star_arity(self.params[h]) \
                if _is_kind(self.params[h]) else None
            if arity is not None and arity >= 1 and len(args) == arity \
                    and all(m == "type" for m, _ in args):
                self.conds.add(h)
                out = head
                for _, a in args:
                    out = TAppT(out, self.walk(a, blocked, fam, locs))
                return out
            return self._opaque(head, args, locs,
                                f"an argument of the parameter '{h}'")
        rule = CONGRUENCES.get(h)
        if rule is not None and len(args) == len(rule.positions):
            out = head
            for pos, (marker, a) in zip(rule.positions, args):
                if pos == "eq" and marker == "type":
                    out = TAppT(out, self.walk(a, blocked, fam, locs))
                elif pos == "pointwise" and marker == "type":
                    if isinstance(a, TLam):
                        v, body = a.var, a.body
                        if v in locs:
                            v2 = fresh_name(v, locs | free_names(body))
                            body = subst1(body, v, Var(v2))
                            v = v2
                        body = self.walk(body, blocked, (v, a.dom),
                                         locs | {v})
                        out = TAppT(out, TLam(v, a.dom, body))
                    else:
                        out = TAppT(out, self.walk(
                            a, "a higher-order argument position", None,
                            locs))
                elif pos == "term" and marker == "term":
                    self._embedded(a)
                    out = TAppTm(out, a)
                else:
                    raise ElabError("clause_shape",
                                    f"'{h}' is applied at the wrong sort")
            return out
        return self._opaque(head, args, locs,
                            f"no congruence rule for the head '{h}'")

    def _opaque(self, head, args, locs, why):
        out = head
        for marker, a in args:
            if marker == "term":
                self._embedded(a)
                out = TAppTm(out, a)
            else:
                out = TAppT(out, self.walk(a, why, None, locs))
        return out

    def _embedded(self, term):
        if self.name in free_names(term):
            raise ElabError(
                "relevant_occurrence",
                f"'{self.name}' appears inside a term; type-level results "
                f"cannot flow into computation")

    def _site(self, ty, args, blocked, fam, locs):
        if blocked:
            raise ElabError(
                "non_congruent_head",
                f"recursive use of '{self.name}' under {blocked}")
        nidx = 1 + len(self.rems)
        if len(args) == len(self.params) + nidx:
            for (p, cls), (marker, a) in zip(self.params.items(),
                                             args[:len(self.params)]):
                ok = (isinstance(a, TVar) and a.name == p) if _is_kind(cls) \
                    else (isinstance(a, Var) and a.name == p)
                if not ok:
                    raise ElabError(
                        "clause_shape",
                        f"recursive use of '{self.name}' must keep "
                        f"parameter '{p}' fixed")
            args = args[len(self.params):]
        elif len(args) != nidx:
            raise ElabError(
                "clause_shape",
                f"recursive use of '{self.name}' expects {nidx} index "
                f"arguments")
        marker, rec = args[0]
        if marker != "term":
            raise ElabError("clause_shape", "the matched index is a term")
        rhead, _ = split_app(rec)
        if not (isinstance(rhead, Var) and rhead.name in self.relevant):
            raise ElabError(
                "clause_shape",
                f"recursive use of '{self.name}' must consume a relevant "
                f"pattern component")
        remvals = []
        for r, (m, a) in zip(self.rems, args[1:]):
            want = "term" if r.form == "term" else "type"
            if m != want:
                raise ElabError("clause_shape",
                                f"index '{r.name}' is applied at the wrong "
                                f"sort in a recursive use")
            if self.name in free_names(a):
                raise ElabError("clause_shape",
                                "nested recursive uses are not supported")
            remvals.append(a)
        termrems = {r.name for r in self.rems if r.form == "term"}
        if free_names(rec) & termrems:
            raise ElabError(
                "clause_shape",
                "a recursive use may not mention a remaining term index "
                "inside its matched argument")
        fv = free_names(ty) & locs
        if not fv:
            sfam = None
        elif fam is not None and fv == {fam[0]}:
            if free_names(fam[1]) & (locs - {fam[0]}):
                raise ElabError(
                    "clause_shape",
                    "the domain of a varying recursive use is not closed")
            sfam = fam
        else:
            raise ElabError(
                "clause_shape",
                f"recursive use of '{self.name}' captures local variables "
                f"{sorted(fv)}")
        ih = self.namer("Ih")
        site = _Site(rec, tuple(remvals), ih, sfam)
        self.sites.append(site)
        if sfam is None:
            return TVar(ih)
        return TAppTm(TVar(ih), Var(sfam[0]))


# ---------------------------------------------------------------------------
# the elaborator

class Elaborator:
    """Compiles typefun and algfold declarations against a kernel context."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.typefuns: dict[str, _Typefun] = {}

    # -- public entry points

    def elaborate(self, decl):
        """Digest, generate and declare; returns the generated declarations.

        Rolls the context back on failure, so callers never observe a
        partially declared bundle.
        """
        snap = self._snapshot()
        try:
            if isinstance(decl, TypefunDecl):
                tf = self._digest_typefun(decl)
                self._generate(tf)
                self.typefuns[tf.name] = tf
                return list(tf.decls)
            if isinstance(decl, AlgfoldDecl):
                return self._elaborate_algfold(decl)
        except (ElabError, TypingError):
            self._rollback(snap)
            raise
        raise AssertionError(f"not elaborable: {type(decl).__name__}")

    def occurrence_check(self, decl) -> None:
        """Run only the analysis passes; raises ElabError on rejection."""
        if isinstance(decl, TypefunDecl):
            self._digest_typefun(decl)
        elif isinstance(decl, AlgfoldDecl):
            self._algfold_analyze(decl)
        else:
            raise AssertionError(f"not elaborable: {type(decl).__name__}")

    # -- context transaction

    def _snapshot(self):
        c = self.ctx
        return (set(c.datas), set(c.defs), set(c.typedefs),
                set(c.ctor_owner), set(c.env.defs), set(c.env.typedefs),
                set(c.env.ctors))

    def _rollback(self, snap):
        c = self.ctx
        tables = (c.datas, c.defs, c.typedefs, c.ctor_owner, c.env.defs,
                  c.env.typedefs)
        for table, keep in zip(tables, snap):
            for k in [k for k in table if k not in keep]:
                del table[k]
        c.env.ctors.intersection_update(snap[6])

    def _namer(self, *seeds):
        c = self.ctx
        used = (set(c.datas) | set(c.defs) | set(c.typedefs)
                | set(c.ctor_owner) | set(seeds))

        def fresh(base):
            name = base if base not in used else fresh_name(base, used)
            used.add(name)
            return name

        return fresh

    # -- typefun digestion

    def _digest_typefun(self, d: TypefunDecl) -> _Typefun:
        ctx = self.ctx
        if ctx.taken(d.name):
            raise TypingError("name_clash", f"{d.name} is already defined")
        pnames = [p for p, _ in d.params]
        indices = _kind_telescope(d.kind)
        if not indices:
            raise ElabError("clause_shape",
                            f"typefun '{d.name}' has no index to match on")
        taken = set(pnames) | {d.name}
        for c in d.clauses:
            taken.update(b.name for b in c.binders)
        fixed = []
        ren = {}
        for n, cls in indices:
            cls = self._cls_sub(cls, ren)
            nn = n if n not in taken else fresh_name(n, taken)
            taken.add(nn)
            if nn != n:
                ren[n] = TVar(nn) if _is_kind(cls) else Var(nn)
            fixed.append((nn, cls))
        (i0, i0cls), rem_raw = fixed[0], fixed[1:]
        if _is_kind(i0cls):
            raise ElabError("clause_shape",
                            f"the matched index of '{d.name}' must be a "
                            f"term")
        spined = data_spine(ctx, i0cls)
        if spined is None:
            raise ElabError(
                "clause_shape",
                f"the matched index of '{d.name}' is not classified by a "
                f"datatype")
        dsig, dpact, diact = spined
        rems = []
        for n, cls in rem_raw:
            if not _is_kind(cls):
                rems.append(_Rem(n, cls, "term"))
            elif isinstance(cls, KStar):
                rems.append(_Rem(n, cls, "star"))
            elif isinstance(cls, KPi) and isinstance(cls.cod, KStar) \
                    and not _is_kind(cls.dom):
                rems.append(_Rem(n, cls, "family", cls.var, cls.dom))
            else:
                raise ElabError(
                    "clause_shape",
                    f"index '{n}' of '{d.name}' has an unsupported kind")
        rems = tuple(rems)

        by_ctor = {}
        for c in d.clauses:
            if c.ctor in by_ctor:
                raise ElabError("clause_shape",
                                f"duplicate clause for '{c.ctor}'")
            by_ctor[c.ctor] = c
        known = {cs.name for cs in dsig.ctors}
        for cname in by_ctor:
            if cname not in known:
                raise ElabError(
                    "clause_shape",
                    f"'{cname}' is not a constructor of '{dsig.name}'")

        conds_found: set[str] = set()
        clauses = []
        for csig in dsig.ctors:
            fate, sub, paths = self._force_indices(dsig, csig,
                                                   list(dpact), list(diact))
            if fate == "impossible":
                if csig.name in by_ctor:
                    raise ElabError(
                        "clause_shape",
                        f"'{csig.name}' cannot occur at this index; drop "
                        f"its clause")
                continue
            if csig.name not in by_ctor:
                raise ElabError("clause_shape",
                                f"missing clause for '{csig.name}'")
            clauses.append(self._digest_clause(
                d, dsig, csig, by_ctor[csig.name], list(dpact), sub, paths,
                rems, i0, conds_found))

        pmap = dict(d.params)
        conds = tuple(
            (p, _all_star_arity(pmap[p]), "resp" + _uc(p))
            for p, _ in d.params
            if p in conds_found)
        return _Typefun(
            name=d.name, params=tuple(d.params), kind=d.kind, i0=i0,
            i0cls=i0cls, dsig=dsig, dpact=tuple(dpact), diact=tuple(diact),
            rems=rems, clauses=tuple(clauses), conds=conds, rel=d.name + "R",
            surface_clauses=tuple(d.clauses))

    def _force_indices(self, dsig, csig, dpact, diact):
        """Match a constructor's result indices against the matched actuals.

        Returns ("ok", bindings, paths) or ("impossible", None, None).  A
        path locates a binding under relevant constructor arguments, by
        application position; None marks a binding that sits under an
        erased or type argument and so cannot be projected out later.
        """
        psub = {p: a for (p, _), (_, a) in zip(dsig.params, dpact)}
        bindable = {n for n, _, _ in csig.args}
        sub, paths = {}, {}

        def stuck():
            raise ElabError(
                "clause_shape",
                f"cannot decide whether '{csig.name}' can occur at this "
                f"index")

        def match(e, t, path):
            if isinstance(e, (Var, TVar)) and e.name in bindable:
                if e.name in sub:
                    if not alpha_eq(sub[e.name], t):
                        stuck()
                else:
                    sub[e.name] = t
                    paths[e.name] = path
                return "ok"
            if _is_type(e) or _is_type(t):
                return "ok" if alpha_eq(e, t) else stuck()
            he, eargs = split_app(e)
            ht, targs = split_app(t)
            e_ctor = isinstance(he, Var) and he.name in self.ctx.ctor_owner
            t_ctor = isinstance(ht, Var) and ht.name in self.ctx.ctor_owner
            if e_ctor and t_ctor:
                if he.name != ht.name or len(eargs) != len(targs):
                    return "clash"
                for i, ((me, ae), (mt, at)) in enumerate(zip(eargs, targs)):
                    if me != mt:
                        return "clash"
                    sp = path + ((he.name, i),) \
                        if me == "term" and path is not None else None
                    r = match(ae, at, sp)
                    if r != "ok":
                        # a clash under an erased argument is not
                        # separable, so it cannot justify dropping the
                        # clause
                        if me != "term":
                            stuck()
                        return r
                return "ok"
            if alpha_eq(e, t):
                return "ok"
            if e_ctor != t_ctor:
                stuck()
            return "clash" if e_ctor else stuck()

        for (sort, e), (_, t) in zip(csig.result_indices, diact):
            if match(subst(e, psub), t, ()) == "clash":
                return ("impossible", None, None)
        return ("ok", sub, paths)

    def _digest_clause(self, d, dsig, csig, clause, dpact, sub, paths, rems,
                       i0, conds_found):
        unforced = [(n, m, c) for n, m, c in csig.args if n not in sub]
        if len(clause.binders) != len(unforced):
            raise ElabError(
                "clause_shape",
                f"clause for '{csig.name}' binds {len(clause.binders)} "
                f"arguments, expected {len(unforced)}")
        mapping = {p: a for (p, _), (_, a) in zip(dsig.params, dpact)}
        binders = []
        bi = 0
        for aname, marker, cls in csig.args:
            cls_i = subst(cls, mapping)
            if aname in sub:
                mapping[aname] = sub[aname]
            else:
                b = clause.binders[bi]
                bi += 1
                if b.marker != marker:
                    raise ElabError(
                        "clause_shape",
                        f"binder '{b.name}' of the '{csig.name}' clause "
                        f"must be marked '{marker}'")
                binders.append((b.name, marker, cls_i))
                mapping[aname] = TVar(b.name) if marker == "type" \
                    else Var(b.name)

        pattern = Var(csig.name)
        for m, a in dpact:
            pattern = AppT(pattern, a) if m == "type" else AppI(pattern, a)
        for aname, marker, _ in csig.args:
            pattern = _ap(pattern, marker, mapping[aname])

        rhs = clause.rhs
        isub = {i0: pattern}
        for r in rems:
            if not isinstance(rhs, TLam):
                raise ElabError(
                    "clause_shape",
                    f"clause for '{csig.name}' must bind index '{r.name}' "
                    f"with a type-level lambda")
            want = self._cls_sub(r.cls, isub)
            got = rhs.dom
            if _is_kind(want) != _is_kind(got):
                raise ElabError("clause_shape",
                                f"clause for '{csig.name}': index "
                                f"'{r.name}' bound at the wrong sort")
            ok = kind_conv(got, want, self.ctx.env) if _is_kind(want) \
                else type_conv(got, want, self.ctx.env)
            if not ok:
                raise ElabError("clause_shape",
                                f"clause for '{csig.name}': lambda for "
                                f"index '{r.name}' has the wrong classifier")
            body = rhs.body
            if rhs.var != r.name:
                body = subst(body, {rhs.var: TVar(r.name)
                                    if _is_kind(r.cls) else Var(r.name)})
            rhs = body

        namer = self._namer(*[b.name for b in clause.binders],
                            *[p for p, _ in d.params], i0,
                            *[r.name for r in rems])
        relevant = [n for n, m, _ in binders if m == "term"]
        w = _Walker(d.name, d.params, i0, rems, relevant, namer)
        rhs_ih = w.walk(rhs, None, None, set())
        conds_found.update(w.conds)
        forced = {n: (sub[n], paths.get(n)) for n in sub}
        return _Clause(ctor=csig.name, binders=tuple(binders), forced=forced,
                       pattern=pattern, rhs=rhs, sites=tuple(w.sites),
                       rhs_ih=rhs_ih)

    # -- shared builders

    def _cls_sub(self, cls, m):
        """Substitute into a classifier, descending through kinds."""
        if isinstance(cls, KStar):
            return cls
        if isinstance(cls, KPi):
            return KPi(cls.var, self._cls_sub(cls.dom, m),
                       self._cls_sub(cls.cod,
                                     {k: v for k, v in m.items()
                                      if k != cls.var}))
        return subst(cls, m)

    def _rem_cls_at(self, tf, r, i0val, refs):
        m = {tf.i0: i0val}
        for r2, v in zip(tf.rems, refs):
            if r2.name == r.name:
                break
            m[r2.name] = v
        return self._cls_sub(r.cls, m)

    def _apply_params_ty(self, t, tf):
        for p, cls in tf.params:
            t = TAppT(t, TVar(p)) if _is_kind(cls) else TAppTm(t, Var(p))
        return t

    def _relapp(self, tf, i0val, remvals, xval):
        t = self._apply_params_ty(TVar(tf.rel), tf)
        t = TAppTm(t, i0val)
        for r, v in zip(tf.rems, remvals):
            t = TAppTm(t, v) if r.form == "term" else TAppT(t, v)
        if xval is not None:
            t = TAppT(t, xval)
        return t

    def _canon(self, tf, i0val, remvals):
        t = self._apply_params_ty(TVar(tf.name), tf)
        t = TAppTm(t, i0val)
        for r, v in zip(tf.rems, remvals):
            t = TAppTm(t, v) if r.form == "term" else TAppT(t, v)
        return t

    def _rem_refs(self, tf):
        return [Var(r.name) if r.form == "term" else TVar(r.name)
                for r in tf.rems]

    def _ih_kind(self, site):
        if site.fam is None:
            return KStar()
        return KPi(site.fam[0], site.fam[1], KStar())

    def _site_prem_ty(self, tf, site, ihty):
        """The relation premise recorded for one recursive use."""
        if site.fam is None:
            return self._relapp(tf, site.rec, list(site.rems), ihty)
        fvar, fdom = site.fam
        return TPi(fvar, fdom,
                   self._relapp(tf, site.rec, list(site.rems),
                                _tapp1(ihty, Var(fvar))))

    def _site_canon(self, tf, site):
        """The canonical type standing for one recursive use."""
        canon = self._canon(tf, site.rec, list(site.rems))
        if site.fam is None:
            return canon
        return TLam(site.fam[0], site.fam[1], canon)

    def _relctor_tm(self, tf, cl, bvals, remvals, ihvals, premvals, xval,
                    eqprf):
        t = Var(cl.relctor)
        for p, cls in tf.params:
            t = AppT(t, TVar(p)) if _is_kind(cls) else AppI(t, Var(p))
        for (n, m, _), v in zip(cl.binders, bvals):
            t = AppT(t, v) if m == "type" else AppI(t, v)
        for r, v in zip(tf.rems, remvals):
            t = AppI(t, v) if r.form == "term" else AppT(t, v)
        for ih, prem in zip(ihvals, premvals):
            t = App(AppT(t, ih), prem)
        return AppI(AppT(t, xval), eqprf)

    def _cond_type(self, p, arity):
        lhs = rhs = TVar(p)
        groups = []
        taken = {p}
        for _ in range(arity):
            a1 = fresh_name("A1", taken)
            taken.add(a1)
            a2 = fresh_name("A2", taken)
            taken.add(a2)
            groups.append((a1, a2))
            lhs, rhs = TAppT(lhs, TVar(a1)), TAppT(rhs, TVar(a2))
        ty = TTpEq(lhs, rhs)
        for a1, a2 in reversed(groups):
            ty = TAll(a1, KStar(),
                      TAll(a2, KStar(),
                           TAll("_", TTpEq(TVar(a1), TVar(a2)), ty)))
        return ty

    def _wrap_pc(self, tf, ty):
        for p, arity, cv in reversed(tf.conds):
            ty = TAll(cv, self._cond_type(p, arity), ty)
        for p, cls in reversed(tf.params):
            ty = TAll(p, cls, ty)
        return ty

    def _lam_pc(self, tf, body):
        for _, _, cv in reversed(tf.conds):
            body = LamI(cv, None, body)
        for p, _ in reversed(tf.params):
            body = LamI(p, None, body)
        return body

    def _lem_head(self, tf, name):
        t = Var(name)
        for p, cls in tf.params:
            t = AppT(t, TVar(p)) if _is_kind(cls) else AppI(t, Var(p))
        for _, _, cv in tf.conds:
            t = AppI(t, Var(cv))
        return t

    def _pw_type(self, r, clsL, clsR, lv, rv):
        """Pointwise-agreement premise for one remaining index."""
        if r.form == "term":
            return TEq(lv, rv)
        if r.form == "star":
            return TTpEq(lv, rv)
        domL, domR = clsL.dom, clsR.dom
        taken = (free_names(domL) | free_names(domR) | free_names(lv)
                 | free_names(rv))
        x1 = fresh_name("x1", taken)
        x2 = fresh_name("x2", taken | {x1})
        return TPi(x1, domL,
                   TPi(x2, domR,
                       TPi("_", TEq(Var(x1), Var(x2)),
                           TTpEq(_tapp1(lv, Var(x1)), _tapp1(rv, Var(x2))))))

    def _pw_refl(self, r, value, cls):
        if r.form == "term":
            return Beta()
        if r.form == "star":
            return AppT(Var("tpEqRefl"), value)
        dom = cls.dom
        taken = free_names(dom) | free_names(value)
        x1 = fresh_name("x1", taken)
        x2 = fresh_name("x2", taken | {x1})
        q = fresh_name("q", taken | {x1, x2})
        prf = AppI(AppI(AppI(AppT(AppT(Var("famTpEq"), dom), value),
                             Var(x1)), Var(x2)), Var(q))
        return Lam(x1, None, Lam(x2, None, Lam(q, None, prf)))

    # -- equality engines

    def _refl(self, ty):
        return _EqPrf(ty, ty, AppT(Var("tpEqRefl"), ty))

    def _sym(self, p: _EqPrf) -> _EqPrf:
        prf = AppI(AppT(AppT(Var("tpEqSym"), p.left), p.right), p.prf)
        return _EqPrf(p.right, p.left, prf)

    def _trans(self, a: _EqPrf, b: _EqPrf) -> _EqPrf:
        prf = AppI(AppI(AppT(AppT(AppT(Var("tpEqTrans"), a.left), a.right),
                             b.right), a.prf), b.prf)
        return _EqPrf(a.left, b.right, prf)

    def _subL(self, t, links):
        return subst(t, {v: lk.left for v, lk in links.items()})

    def _subR(self, t, links):
        return subst(t, {v: lk.right for v, lk in links.items()})

    def _term_eq(self, t, links):
        """A proof of { t[left sides] ~ t[right sides] }."""
        used = {v for v in free_names(t)
                if v in links and links[v].form == "term"}
        if not used:
            return Beta()
        if isinstance(t, Var) and t.name in used:
            return links[t.name].prf
        head, args = split_app(t)
        if not isinstance(head, Var):
            raise ElabError("clause_shape",
                            "cannot track an equality through this term")
        p = links[head.name].prf if head.name in used else Beta()
        fL, fR = self._subL(head, links), self._subR(head, links)
        for marker, a in args:
            aL, aR = self._subL(a, links), self._subR(a, links)
            if marker == "term":
                q = self._term_eq(a, links)
                p = self._app_eq(p, q, fL, fR, aL, aR)
            fL = _ap(fL, marker, aL)
            fR = _ap(fR, marker, aR)
        return p

    def _app_eq(self, p, q, fL, fR, aL, aR):
        if isinstance(p, Beta) and isinstance(q, Beta):
            return Beta()
        taken = (free_names(fL) | free_names(fR) | free_names(aL)
                 | free_names(aR))
        if isinstance(p, Beta):
            inner = Beta()
        else:
            w = fresh_name("v", taken)
            inner = Rho(p, w, TEq(App(Var(w), aR), App(fR, aR)), Beta())
        if isinstance(q, Beta):
            return inner
        v = fresh_name("u", taken)
        return Rho(q, v, TEq(App(fL, Var(v)), App(fR, aR)), inner)

    def _fam_chain(self, template, links) -> _EqPrf:
        """Chain famTpEq steps, moving one linked term variable at a time."""
        order = [(v, lk) for v, lk in links.items()
                 if v in free_names(template) and lk.form == "term"]
        avoid = free_names(template) | set(links)
        for _, lk in order:
            avoid |= free_names(lk.left) | free_names(lk.right)
        acc = None
        for k, (v, lk) in enumerate(order):
            if lk.clsL is None or lk.clsR is None \
                    or not alpha_eq(lk.clsL, lk.clsR):
                raise ElabError(
                    "clause_shape",
                    f"cannot chain a type equality over '{v}': its two "
                    f"sides live at different classifiers")
            mapped = {}
            for j, (v2, lk2) in enumerate(order):
                if j < k:
                    mapped[v2] = lk2.right
                elif j > k:
                    mapped[v2] = lk2.left
            zv = fresh_name("z", avoid | free_names(lk.clsL))
            fam = TLam(zv, lk.clsL, subst(template, {**mapped, v: Var(zv)}))
            stepL = subst(template, {**mapped, v: lk.left})
            stepR = subst(template, {**mapped, v: lk.right})
            prf = AppI(AppI(AppI(AppT(AppT(Var("famTpEq"), lk.clsL), fam),
                                 lk.left), lk.right), lk.prf)
            step = _EqPrf(stepL, stepR, prf)
            acc = step if acc is None else self._trans(acc, step)
        if acc is None:
            return self._refl(subst(template,
                                    {v: lk.left for v, lk in order}))
        return acc

    def _bridge(self, tf, template, links) -> _EqPrf:
        """A TpEq proof between the two instantiations of a type template."""
        used = {v: lk for v, lk in links.items()
                if v in free_names(template)}
        if not used:
            return self._refl(template)
        if all(lk.form == "term" for lk in used.values()):
            return self._fam_chain(template, used)
        match template:
            case TVar(v) if v in used and used[v].form == "star":
                lk = used[v]
                return _EqPrf(lk.left, lk.right, lk.prf)
            case TAppTm(TVar(v), a) if v in used \
                    and used[v].form == "family":
                lk = used[v]
                aL, aR = self._subL(a, links), self._subR(a, links)
                prf = _app_b(_app_b(_app_b(lk.prf, aL), aR),
                             self._term_eq(a, links))
                return _EqPrf(_tapp1(lk.left, aL), _tapp1(lk.right, aR), prf)
            case TPi(v, dom, cod) if v not in free_names(cod):
                d = self._bridge(tf, dom, links)
                c = self._bridge(tf, cod, links)
                prf = AppI(AppT(AppT(AppI(AppT(AppT(
                    Var("arrowTpEq"), d.left), d.right), d.prf), c.left),
                    c.right), c.prf)
                return _EqPrf(TPi(v, d.left, c.left),
                              TPi(v, d.right, c.right), prf)
            case TAppT(_, _) | TAppTm(_, _):
                return self._bridge_spine(tf, template, links)
        raise ElabError(
            "non_congruent_head",
            "no congruence rule covers this position of the right-hand "
            "side")

    def _bridge_spine(self, tf, template, links) -> _EqPrf:
        head, args = split_tapp(template)
        if not isinstance(head, TVar):
            raise ElabError("non_congruent_head",
                            "unsupported type application head")
        h = head.name
        conds = {p: cv for p, _, cv in tf.conds} if tf is not None else {}
        if h in conds:
            prf = Var(conds[h])
            L = R = head
            for _, a in args:
                p = self._bridge(tf, a, links)
                prf = AppI(AppT(AppT(prf, p.left), p.right), p.prf)
                L, R = TAppT(L, p.left), TAppT(R, p.right)
            return _EqPrf(L, R, prf)
        rule = CONGRUENCES.get(h)
        if rule is None or len(args) != len(rule.positions):
            raise ElabError("non_congruent_head",
                            f"no congruence rule for the head '{h}'")
        prf = Var(rule.lemma)
        L = R = head
        for pos, (marker, a) in zip(rule.positions, args):
            if pos == "eq":
                p = self._bridge(tf, a, links)
                prf = AppI(AppT(AppT(prf, p.left), p.right), p.prf)
                L, R = TAppT(L, p.left), TAppT(R, p.right)
            elif pos == "pointwise":
                p = self._bridge_pointwise(tf, a, links)
                prf = AppI(AppT(AppT(prf, p.left), p.right), p.prf)
                L, R = TAppT(L, p.left), TAppT(R, p.right)
            else:  # term slot: must be identical on both sides
                if free_names(a) & set(links):
                    raise ElabError(
                        "non_congruent_head",
                        f"the term argument of '{h}' changes between the "
                        f"two sides")
                prf = AppI(prf, a)
                L, R = TAppTm(L, a), TAppTm(R, a)
        return _EqPrf(L, R, prf)

    def _bridge_pointwise(self, tf, a, links) -> _EqPrf:
        if isinstance(a, TLam):
            v, dom, body = a.var, a.dom, a.body
        else:
            v = fresh_name("z", free_names(a) | set(links))
            dom, body = None, _tapp1(a, Var(v))
        if v in links:
            v2 = fresh_name(v, set(links) | free_names(body))
            body = subst1(body, v, Var(v2))
            v = v2
        taken = set(links) | free_names(body) | {v}
        for lk in links.values():
            taken |= (free_names(lk.left) | free_names(lk.right)
                      | free_names(lk.prf))
        x1 = fresh_name("x1", taken)
        x2 = fresh_name("x2", taken | {x1})
        q = fresh_name("q", taken | {x1, x2})
        domL = self._subL(dom, links) if dom is not None else None
        domR = self._subR(dom, links) if dom is not None else None
        inner = dict(links)
        inner[v] = _Link("term", Var(x1), Var(x2), Var(q), domL, domR)
        p = self._bridge(tf, body, inner)
        fn = Lam(x1, None, Lam(x2, None, Lam(q, None, p.prf)))
        if dom is not None:
            left = TLam(v, domL, self._subL(body, links))
            right = TLam(v, domR, self._subR(body, links))
        else:
            left, right = self._subL(a, links), self._subR(a, links)
        return _EqPrf(left, right, fn)

    def _coerce_tm(self, v, template, links, fwd=True):
        """Carry a term across a provably equal classifier.

        fwd moves a value from the left instantiation to the right one;
        otherwise the reverse.
        """
        used = {k: lk for k, lk in links.items()
                if k in free_names(template)}
        if not used:
            return v
        br = self._bridge(None, template, used)
        return App(TpEq1(br.prf) if fwd else TpEq2(br.prf), v)

    def _extract_eq(self, q, tL, tR, path):
        """Project an equality between constructor forms along a path."""
        for cname, argidx in path:
            _, argsL = split_app(tL)
            _, argsR = split_app(tR)
            aL, aR = argsL[argidx][1], argsR[argidx][1]
            dsig = self.ctx.datas[self.ctx.ctor_owner[cname]]
            csig = dsig.ctor(cname)
            arm_idx = argidx - (len(argsL) - len(csig.args))
            avoid = free_names(aR)
            zv = fresh_name("z", avoid)
            arms = []
            for k in dsig.ctors:
                taken = {zv} | avoid
                vs = []
                for n, marker, _ in k.args:
                    nm = fresh_name(n, taken)
                    taken.add(nm)
                    vs.append(BranchVar(nm, marker))
                body = Var(vs[arm_idx].name) if k.name == cname else Beta()
                arms.append(Branch(k.name, tuple(vs), (), body))
            proj = Match(Var(zv), None, tuple(arms))
            q = Rho(q, zv, TEq(proj, aR), Beta())
            tL, tR = aL, aR
        return q

    # -- generation

    def _generate(self, tf: _Typefun):
        self._gen_relation(tf)
        self._gen_canonical(tf)
        self._gen_resp(tf)
        self._gen_unique(tf)
        for cl in tf.clauses:
            self._gen_eq_lemma(tf, cl)
        self._gen_rex(tf)
        self._gen_comp_laws(tf)
        self._gen_canon_resp(tf)
        self._gen_variants(tf)

    def _declare(self, out, decl):
        ctx = self.ctx
        if isinstance(decl, DataDecl):
            declare_data(ctx, decl.name, decl.params, decl.kind, decl.ctors)
        elif isinstance(decl, TypeDecl):
            declare_typedef(ctx, decl.name, decl.kind, decl.body)
        else:
            declare_def(ctx, decl.name, decl.ty, decl.body)
        out.append(decl)

    def _all_binder_names(self, tf):
        names = []
        for cl in tf.clauses:
            names.extend(n for n, _, _ in cl.binders)
            names.extend(s.ih for s in cl.sites)
        names.extend(r.name for r in tf.rems)
        return names

    # relation and canonical type

    def _gen_relation(self, tf):
        ctors = []
        for cl in tf.clauses:
            namer = self._namer(*[n for n, _, _ in cl.binders],
                                *[r.name for r in tf.rems],
                                *[s.ih for s in cl.sites],
                                *[p for p, _ in tf.params])
            xv = namer("X")
            ty = self._relapp(tf, cl.pattern, self._rem_refs(tf), TVar(xv))
            ty = TAll("_", TTpEq(TVar(xv), cl.rhs_ih), ty)
            ty = TAll(xv, KStar(), ty)
            for s in reversed(cl.sites):
                ty = TPi("_", self._site_prem_ty(tf, s, TVar(s.ih)), ty)
                ty = TAll(s.ih, self._ih_kind(s), ty)
            for r in reversed(tf.rems):
                ty = TAll(r.name,
                          self._rem_cls_at(tf, r, cl.pattern,
                                           self._rem_refs(tf)), ty)
            for n, m, c in reversed(cl.binders):
                ty = TAll(n, c, ty)
            cl.relctor = _lc(tf.name) + "R" + _uc(cl.ctor)
            ctors.append((cl.relctor, ty))
        kind = KPi("_", KStar(), KStar())
        for r in reversed(tf.rems):
            kind = KPi(r.name, r.cls, kind)
        kind = KPi(tf.i0, tf.i0cls, kind)
        self._declare(tf.decls, DataDecl(tf.rel, tf.params, kind,
                                         tuple(ctors)))

    def _gen_canonical(self, tf):
        kind = tf.kind
        for p, cls in reversed(tf.params):
            kind = KPi(p, cls, kind)
        namer = self._namer(tf.i0, *[r.name for r in tf.rems],
                            *[p for p, _ in tf.params])
        xv = namer("X")
        body = TAll(xv, KStar(),
                    TAll("_", self._relapp(tf, Var(tf.i0),
                                           self._rem_refs(tf), TVar(xv)),
                         TVar(xv)))
        for r in reversed(tf.rems):
            body = TLam(r.name, r.cls, body)
        body = TLam(tf.i0, tf.i0cls, body)
        for p, cls in reversed(tf.params):
            body = TLam(p, cls, body)
        self._declare(tf.decls, TypeDecl(tf.name, kind, body))

    # respectfulness

    def _gen_resp(self, tf):
        name = _lc(tf.name) + ("RRespH" if tf.rems else "RResp")
        namer = self._namer(*[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds],
                            *self._all_binder_names(tf))
        i0v = namer(tf.i0)
        rem1 = [namer(r.name) for r in tf.rems]
        rem2 = [namer(r.name + "2") for r in tf.rems]
        pwv = [namer("pw" + _uc(r.name)) for r in tf.rems]
        x1 = namer("X1")
        wv = namer("w")
        x2 = namer("X2")
        ref1 = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, rem1)]
        ref2 = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, rem2)]
        cls1 = [self._rem_cls_at(tf, r, Var(i0v), ref1) for r in tf.rems]
        cls2 = [self._rem_cls_at(tf, r, Var(i0v), ref2) for r in tf.rems]

        cont = self._relapp(tf, Var(i0v), ref2, TVar(x2))
        cont = TAll(x2, KStar(),
                    TAll("_", TTpEq(TVar(x1), TVar(x2)), cont))
        for r, n2, pv, c1, c2, l, rr in reversed(list(zip(
                tf.rems, rem2, pwv, cls1, cls2, ref1, ref2))):
            cont = TAll(pv, self._pw_type(r, c1, c2, l, rr), cont)
            cont = TAll(n2, c2, cont)
        ty = TPi(wv, self._relapp(tf, Var(i0v), ref1, TVar(x1)), cont)
        ty = TAll(x1, KStar(), ty)
        for r, n, c1 in reversed(list(zip(tf.rems, rem1, cls1))):
            ty = TAll(n, c1, ty)
        ty = TAll(i0v, tf.i0cls, ty)
        ty = self._wrap_pc(tf, ty)

        rsp = namer("rsp")
        if tf.clauses:
            motive = Motive(tuple([i0v] + rem1 + [x1]), wv, cont)
            branches = tuple(self._resp_branch(tf, cl, rsp)
                             for cl in tf.clauses)
            body = self._lam_pc(tf, Fix(rsp, wv, motive, branches))
        else:
            sv = namer("s")
            motive = Motive(tuple([i0v] + rem1 + [x1]), sv, cont)
            inner = Lam(wv, None, Match(Var(wv), motive, ()))
            inner = LamI(x1, None, inner)
            for n in reversed(rem1):
                inner = LamI(n, None, inner)
            body = self._lam_pc(tf, LamI(i0v, None, inner))
        self._declare(tf.decls, DefDecl(name, ty, body))
        if tf.rems:
            self._gen_resp_wrapper(tf, name)

    def _resp_branch(self, tf, cl, rsp):
        namer = self._namer(*[n for n, _, _ in cl.binders],
                            *[r.name for r in tf.rems],
                            *[s.ih for s in cl.sites],
                            *[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds], rsp)
        prv = [namer("p" + str(i + 1)) for i in range(len(cl.sites))]
        xv = namer("X")
        ev = namer("e")
        rem2 = [namer(r.name + "2") for r in tf.rems]
        pwv = [namer("pw" + _uc(r.name)) for r in tf.rems]
        x2 = namer("X2")
        e2 = namer("e2")
        vars_ = tuple(
            [BranchVar(n, "erased" if m == "term" else m)
             for n, m, _ in cl.binders]
            + [BranchVar(r.name, "erased" if r.form == "term" else "type")
               for r in tf.rems]
            + [bv for s, pn in zip(cl.sites, prv)
               for bv in (BranchVar(s.ih, "type"), BranchVar(pn, "term"))]
            + [BranchVar(xv, "type"), BranchVar(ev, "erased")])

        links = {}
        lefts = []
        for r, n2, pv in zip(tf.rems, rem2, pwv):
            l = Var(r.name) if r.form == "term" else TVar(r.name)
            rr = Var(n2) if r.form == "term" else TVar(n2)
            c = self._rem_cls_at(tf, r, cl.pattern, lefts)
            links[r.name] = _Link(r.form, l, rr, Var(pv), c, c)
            lefts.append(l)

        prems = [self._resp_transport(tf, s, links, Var(pn), rsp, namer)
                 for s, pn in zip(cl.sites, prv)]
        pe = _EqPrf(TVar(xv), cl.rhs_ih, Var(ev))
        if tf.rems:
            br = self._bridge(tf, cl.rhs_ih, links)
            right = self._trans(pe, br)
        else:
            right = pe
        total = self._trans(self._sym(_EqPrf(TVar(xv), TVar(x2), Var(e2))),
                            right)
        reb = self._relctor_tm(
            tf, cl,
            [TVar(n) if m == "type" else Var(n) for n, m, _ in cl.binders],
            [Var(n) if r.form == "term" else TVar(n)
             for r, n in zip(tf.rems, rem2)],
            [TVar(s.ih) for s in cl.sites], prems, TVar(x2), total.prf)
        body = LamI(x2, None, LamI(e2, None, reb))
        for n2, pv in reversed(list(zip(rem2, pwv))):
            body = LamI(n2, None, LamI(pv, None, body))
        return Branch(cl.relctor, vars_, (), body)

    def _resp_transport(self, tf, site, links, prem, rsp, namer):
        """Rebuild one site premise at the new remaining indices."""
        if not tf.rems:
            return prem
        if site.fam is not None:
            fvar, fdom = site.fam
            fv = namer(fvar)
            rec2 = subst(site.rec, {fvar: Var(fv)})
            rems2 = tuple(subst(v, {fvar: Var(fv)}) for v in site.rems)
            inner = self._resp_transport(
                tf, _Site(rec2, rems2, site.ih, None), links,
                App(prem, Var(fv)), rsp, namer)
            return Lam(fv, None, inner)
        out = AppI(Var(rsp), site.rec)
        for r, v in zip(tf.rems, site.rems):
            old = self._subL(v, links)
            out = AppI(out, old) if r.form == "term" else AppT(out, old)
        ih = TVar(site.ih)
        out = App(AppT(out, ih), prem)
        for r, v in zip(tf.rems, site.rems):
            new = self._subR(v, links)
            out = AppI(out, new) if r.form == "term" else AppT(out, new)
            out = AppI(out, self._site_pw(tf, r, v, links))
        out = AppT(out, ih)
        return AppI(out, AppT(Var("tpEqRefl"), ih))

    def _site_pw(self, tf, r, template, links):
        """Pointwise agreement for one site argument across an index move."""
        if r.form == "term":
            return self._term_eq(template, links)
        if r.form == "star":
            return self._bridge(tf, template, links).prf
        taken = set(links) | free_names(template)
        for lk in links.values():
            taken |= (free_names(lk.left) | free_names(lk.right)
                      | free_names(lk.prf))
        x1 = fresh_name("x1", taken)
        x2 = fresh_name("x2", taken | {x1})
        q = fresh_name("q", taken | {x1, x2})
        zv = fresh_name("z", taken | {x1, x2, q})
        body = _tapp1(template, Var(zv))
        inner = dict(links)
        inner[zv] = _Link("term", Var(x1), Var(x2), Var(q), None, None)
        p = self._bridge(tf, body, inner)
        return Lam(x1, None, Lam(x2, None, Lam(q, None, p.prf)))

    def _gen_resp_wrapper(self, tf, hname):
        name = _lc(tf.name) + "RResp"
        namer = self._namer(*[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds])
        i0v = namer(tf.i0)
        remv = [namer(r.name) for r in tf.rems]
        x1 = namer("X1")
        wv = namer("w")
        x2 = namer("X2")
        ev = namer("e")
        refs = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, remv)]
        clss = [self._rem_cls_at(tf, r, Var(i0v), refs) for r in tf.rems]
        ty = TAll(x2, KStar(),
                  TAll("_", TTpEq(TVar(x1), TVar(x2)),
                       self._relapp(tf, Var(i0v), refs, TVar(x2))))
        ty = TPi(wv, self._relapp(tf, Var(i0v), refs, TVar(x1)), ty)
        ty = TAll(x1, KStar(), ty)
        for r, n, c in reversed(list(zip(tf.rems, remv, clss))):
            ty = TAll(n, c, ty)
        ty = TAll(i0v, tf.i0cls, ty)
        ty = self._wrap_pc(tf, ty)

        call = AppI(self._lem_head(tf, hname), Var(i0v))
        for r, ref in zip(tf.rems, refs):
            call = AppI(call, ref) if r.form == "term" else AppT(call, ref)
        call = App(AppT(call, TVar(x1)), Var(wv))
        for r, ref, c in zip(tf.rems, refs, clss):
            call = AppI(call, ref) if r.form == "term" else AppT(call, ref)
            call = AppI(call, self._pw_refl(r, ref, c))
        call = AppI(AppT(call, TVar(x2)), Var(ev))
        body = LamI(ev, None, call)
        body = LamI(x2, None, body)
        body = Lam(wv, None, body)
        body = LamI(x1, None, body)
        for n in reversed(remv):
            body = LamI(n, None, body)
        body = self._lam_pc(tf, LamI(i0v, None, body))
        self._declare(tf.decls, DefDecl(name, ty, body))

    # uniqueness

    def _gen_unique(self, tf):
        hname = _lc(tf.name) + "RUniqueH"
        namer = self._namer(*[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds],
                            *self._all_binder_names(tf))
        i1 = namer(tf.i0)
        rem1 = [namer(r.name) for r in tf.rems]
        x1 = namer("X1")
        w1 = namer("w1")
        i2 = namer(tf.i0 + "2")
        rem2 = [namer(r.name + "2") for r in tf.rems]
        x2 = namer("X2")
        w2 = namer("w2")
        qv = namer("q")
        pwv = [namer("pw" + _uc(r.name)) for r in tf.rems]
        ref1 = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, rem1)]
        ref2 = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, rem2)]
        cls1 = [self._rem_cls_at(tf, r, Var(i1), ref1) for r in tf.rems]
        cls2 = [self._rem_cls_at(tf, r, Var(i2), ref2) for r in tf.rems]

        goal = TTpEq(TVar(x1), TVar(x2))
        for r, pv, c1, c2, l, rr in reversed(list(zip(
                tf.rems, pwv, cls1, cls2, ref1, ref2))):
            goal = TAll(pv, self._pw_type(r, c1, c2, l, rr), goal)
        goal = TAll(qv, TEq(Var(i1), Var(i2)), goal)
        goal = TPi(w2, self._relapp(tf, Var(i2), ref2, TVar(x2)), goal)
        goal = TAll(x2, KStar(), goal)
        for r, n, c2 in reversed(list(zip(tf.rems, rem2, cls2))):
            goal = TAll(n, c2, goal)
        goal = TAll(i2, tf.i0cls, goal)

        ty = TPi(w1, self._relapp(tf, Var(i1), ref1, TVar(x1)), goal)
        ty = TAll(x1, KStar(), ty)
        for r, n, c1 in reversed(list(zip(tf.rems, rem1, cls1))):
            ty = TAll(n, c1, ty)
        ty = TAll(i1, tf.i0cls, ty)
        ty = self._wrap_pc(tf, ty)

        uq = namer("uq")
        if tf.clauses:
            motive = Motive(tuple([i1] + rem1 + [x1]), w1, goal)
            branches = tuple(self._uniq_branch(tf, cl, uq)
                             for cl in tf.clauses)
            body = self._lam_pc(tf, Fix(uq, w1, motive, branches))
        else:
            sv = namer("s")
            motive = Motive(tuple([i1] + rem1 + [x1]), sv, goal)
            inner = Lam(w1, None, Match(Var(w1), motive, ()))
            inner = LamI(x1, None, inner)
            for n in reversed(rem1):
                inner = LamI(n, None, inner)
            body = self._lam_pc(tf, LamI(i1, None, inner))
        self._declare(tf.decls, DefDecl(hname, ty, body))
        self._gen_unique_wrapper(tf, hname)

    def _uniq_branch(self, tf, cl, uq):
        namer = self._namer(*[n for n, _, _ in cl.binders],
                            *[r.name for r in tf.rems],
                            *[s.ih for s in cl.sites],
                            *[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds], uq)
        prv = [namer("p" + str(i + 1)) for i in range(len(cl.sites))]
        xv = namer("X")
        ev = namer("e")
        vars_ = tuple(
            [BranchVar(n, "erased" if m == "term" else m)
             for n, m, _ in cl.binders]
            + [BranchVar(r.name, "erased" if r.form == "term" else "type")
               for r in tf.rems]
            + [bv for s, pn in zip(cl.sites, prv)
               for bv in (BranchVar(s.ih, "type"), BranchVar(pn, "term"))]
            + [BranchVar(xv, "type"), BranchVar(ev, "erased")])
        i2 = namer(tf.i0 + "2")
        rem2 = [namer(r.name + "2") for r in tf.rems]
        x2 = namer("X2")
        w2 = namer("w2")
        qv = namer("q")
        pwv = [namer("pw" + _uc(r.name)) for r in tf.rems]
        xv2m = namer("Xv")
        sv = namer("v")
        ivars = [namer("i" + str(k)) for k in range(1 + len(tf.rems))]

        inner_branches = tuple(
            self._uniq_inner(tf, cl, cl2, uq, namer, prv, xv, ev, i2, rem2,
                             qv, pwv)
            for cl2 in tf.clauses)
        motive = Motive(tuple(ivars + [xv2m]), sv,
                        TTpEq(TVar(xv), TVar(xv2m)))
        body = Match(Var(w2), motive, inner_branches)
        for pv in reversed(pwv):
            body = LamI(pv, None, body)
        body = LamI(qv, None, body)
        body = Lam(w2, None, body)
        body = LamI(x2, None, body)
        for n in reversed(rem2):
            body = LamI(n, None, body)
        body = LamI(i2, None, body)
        return Branch(cl.relctor, vars_, (), body)

    def _binder_path(self, tf, cl, name):
        """Application position of a relevant binder in the pattern."""
        csig = tf.dsig.ctor(cl.ctor)
        bi = 0
        for k, (aname, marker, _) in enumerate(csig.args):
            if aname in cl.forced:
                continue
            n, m, _ = cl.binders[bi]
            bi += 1
            if n == name:
                return ((cl.ctor, len(tf.dpact) + k),) if m == "term" \
                    else None
        return None

    def _uniq_inner(self, tf, cl, cl2, uq, namer, prv, xv, ev, i2, rem2, qv,
                    pwv):
        bn2 = [namer(n + "'") for n, _, _ in cl2.binders]
        remn2 = [namer(r.name + "'") for r in tf.rems]
        ihn2 = [namer(s.ih + "'") for s in cl2.sites]
        prn2 = [namer("p" + str(i + 1) + "'")
                for i in range(len(cl2.sites))]
        xn2 = namer("X'")
        en2 = namer("e'")
        eqn = [namer("g" + (str(k) if k else ""))
               for k in range(1 + len(tf.rems))]
        vars_ = tuple(
            [BranchVar(n, "erased" if m == "term" else m)
             for (_, m, _), n in zip(cl2.binders, bn2)]
            + [BranchVar(n, "erased" if r.form == "term" else "type")
               for r, n in zip(tf.rems, remn2)]
            + [bv for s, ihn, pn in zip(cl2.sites, ihn2, prn2)
               for bv in (BranchVar(ihn, "type"), BranchVar(pn, "term"))]
            + [BranchVar(xn2, "type"), BranchVar(en2, "erased")])

        ren2 = {n0: (TVar(n) if m == "type" else Var(n))
                for (n0, m, _), n in zip(cl2.binders, bn2)}
        pat2 = subst(cl2.pattern, ren2)
        dty = tf.i0cls
        E = AppI(AppI(AppI(AppI(AppI(AppT(AppT(AppT(
            Var("eqTrans"), dty), dty), dty), cl.pattern), Var(i2)), pat2),
            Var(qv)), Var(eqn[0]))
        if cl2.ctor != cl.ctor:
            return Branch(cl2.relctor, vars_, (eqn[0],), Delta(E))

        # same constructor on both sides: link every template variable
        # across the two copies, then bridge the right-hand side
        links = {}
        for (n, m, c), n2 in zip(cl.binders, bn2):
            if m != "term":
                continue
            path = self._binder_path(tf, cl, n)
            prf = self._extract_eq(E, cl.pattern, pat2, path)
            cR = subst(c, {k: lk.right for k, lk in links.items()})
            links[n] = _Link("term", Var(n), Var(n2), prf, c, cR)
        for (n, m, _) in cl.binders:
            if n not in links and n in free_names(cl.rhs_ih):
                raise ElabError(
                    "clause_shape",
                    f"the '{m}' binder '{n}' feeds the result type but "
                    f"cannot be projected from an index equality")

        l2m = {tf.i0: _Link("term", cl.pattern, Var(i2), Var(qv),
                            tf.i0cls, tf.i0cls)}
        lefts, mids, rights = [], [], []
        for j, r in enumerate(tf.rems):
            left = Var(r.name) if r.form == "term" else TVar(r.name)
            mid = Var(rem2[j]) if r.form == "term" else TVar(rem2[j])
            right = Var(remn2[j]) if r.form == "term" else TVar(remn2[j])
            prf = self._uniq_rem_prf(tf, cl, r, j, left, mid, right,
                                     lefts, mids, rights, pwv[j],
                                     eqn[1 + j], i2, pat2, l2m, namer)
            clsL = self._rem_cls_at(tf, r, cl.pattern, lefts)
            clsR = self._rem_cls_at(tf, r, pat2, rights)
            links[r.name] = _Link(r.form, left, right, prf, clsL, clsR)
            l2m[r.name] = _Link(r.form, left, mid, Var(pwv[j]),
                                clsL, self._rem_cls_at(tf, r, Var(i2),
                                                       mids))
            lefts.append(left)
            mids.append(mid)
            rights.append(right)
        for s, pn, s2, ihn, pn2 in zip(cl.sites, prv, cl2.sites, ihn2,
                                       prn2):
            prf = self._uniq_ih_link(tf, s, Var(pn), ihn, Var(pn2), links,
                                     uq, namer)
            form = "star" if s.fam is None else "family"
            links[s.ih] = _Link(form, TVar(s.ih), TVar(ihn), prf)
        br = self._bridge(tf, cl.rhs_ih, links)
        e1 = _EqPrf(TVar(xv), br.left, Var(ev))
        e2 = _EqPrf(TVar(xn2), br.right, Var(en2))
        total = self._trans(e1, self._trans(br, self._sym(e2)))
        return Branch(cl2.relctor, vars_, tuple(eqn), total.prf)

    def _uniq_rem_prf(self, tf, cl, r, j, left, mid, right, lefts, mids,
                      rights, pv, en, i2, pat2, l2m, namer):
        """Compose a pointwise premise with the matching index equation."""
        if r.form == "star":
            return AppI(AppI(AppT(AppT(AppT(
                Var("tpEqTrans"), left), mid), right), Var(pv)), Var(en))
        if r.form == "term":
            clsL = self._rem_cls_at(tf, r, cl.pattern, lefts)
            clsM = self._rem_cls_at(tf, r, Var(i2), mids)
            clsR = self._rem_cls_at(tf, r, pat2, rights)
            return AppI(AppI(AppI(AppI(AppI(AppT(AppT(AppT(
                Var("eqTrans"), clsL), clsM), clsR), left), mid), right),
                Var(pv)), Var(en))
        dom = r.cls.dom
        x1 = namer("x1")
        x2 = namer("x2")
        qx = namer("qx")
        x2m = self._coerce_tm(Var(x1), dom, l2m)
        inner = App(App(App(Var(pv), Var(x1)), x2m), Beta())
        inner2 = App(App(App(Var(en), x2m), Var(x2)), Var(qx))
        prf = AppI(AppI(AppT(AppT(AppT(
            Var("tpEqTrans"), _tapp1(left, Var(x1))), _tapp1(mid, x2m)),
            _tapp1(right, Var(x2))), inner), inner2)
        return Lam(x1, None, Lam(x2, None, Lam(qx, None, prf)))

    def _uniq_ih_link(self, tf, s1, p1, ihn, p2, links, uq, namer):
        """Recursive uniqueness at one site, as a TpEq or pointwise proof."""
        if s1.fam is None:
            return self._uniq_ih_call(tf, s1, p1, TVar(s1.ih), ihn, p2,
                                      links, uq)
        fvar, _ = s1.fam
        x1 = namer("x1")
        x2 = namer("x2")
        qx = namer("qx")
        lks = dict(links)
        lks[fvar] = _Link("term", Var(x1), Var(x2), Var(qx), None, None)
        site = _Site(s1.rec, s1.rems, s1.ih, None)
        call = self._uniq_ih_call(
            tf, site, App(p1, Var(x1)), _tapp1(TVar(s1.ih), Var(x1)), ihn,
            App(p2, Var(x2)), lks, uq,
            ih2=_tapp1(TVar(ihn), Var(x2)))
        return Lam(x1, None, Lam(x2, None, Lam(qx, None, call)))

    def _uniq_ih_call(self, tf, site, p1, ih1, ihn, p2, links, uq,
                      ih2=None):
        if ih2 is None:
            ih2 = TVar(ihn)
        q = self._term_eq(site.rec, links)
        call = AppI(Var(uq), self._subL(site.rec, links))
        for r, v in zip(tf.rems, site.rems):
            lv = self._subL(v, links)
            call = AppI(call, lv) if r.form == "term" else AppT(call, lv)
        call = App(AppT(call, ih1), p1)
        call = AppI(call, self._subR(site.rec, links))
        for r, v in zip(tf.rems, site.rems):
            rv = self._subR(v, links)
            call = AppI(call, rv) if r.form == "term" else AppT(call, rv)
        call = App(AppT(call, ih2), p2)
        call = AppI(call, q)
        for r, v in zip(tf.rems, site.rems):
            call = AppI(call, self._site_pw(tf, r, v, links))
        return call

    def _gen_unique_wrapper(self, tf, hname):
        name = _lc(tf.name) + "RUnique"
        namer = self._namer(*[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds])
        i0v = namer(tf.i0)
        remv = [namer(r.name) for r in tf.rems]
        x1 = namer("X1")
        w1 = namer("w1")
        x2 = namer("X2")
        w2 = namer("w2")
        refs = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, remv)]
        clss = [self._rem_cls_at(tf, r, Var(i0v), refs) for r in tf.rems]
        ty = TPi(w2, self._relapp(tf, Var(i0v), refs, TVar(x2)),
                 TTpEq(TVar(x1), TVar(x2)))
        ty = TAll(x2, KStar(), ty)
        ty = TPi(w1, self._relapp(tf, Var(i0v), refs, TVar(x1)), ty)
        ty = TAll(x1, KStar(), ty)
        for r, n, c in reversed(list(zip(tf.rems, remv, clss))):
            ty = TAll(n, c, ty)
        ty = TAll(i0v, tf.i0cls, ty)
        ty = self._wrap_pc(tf, ty)

        call = AppI(self._lem_head(tf, hname), Var(i0v))
        for r, ref in zip(tf.rems, refs):
            call = AppI(call, ref) if r.form == "term" else AppT(call, ref)
        call = App(AppT(call, TVar(x1)), Var(w1))
        call = AppI(call, Var(i0v))
        for r, ref in zip(tf.rems, refs):
            call = AppI(call, ref) if r.form == "term" else AppT(call, ref)
        call = App(AppT(call, TVar(x2)), Var(w2))
        call = AppI(call, Beta())
        for r, ref, c in zip(tf.rems, refs, clss):
            call = AppI(call, self._pw_refl(r, ref, c))
        body = Lam(w2, None, call)
        body = LamI(x2, None, body)
        body = Lam(w1, None, body)
        body = LamI(x1, None, body)
        for n in reversed(remv):
            body = LamI(n, None, body)
        body = self._lam_pc(tf, LamI(i0v, None, body))
        self._declare(tf.decls, DefDecl(name, ty, body))

    # per-clause equalities, existence, computation laws

    def _eq_name(self, tf, cl):
        return _lc(tf.name) + _uc(cl.ctor) + "Eq"

    def _rex_name(self, tf):
        return _lc(tf.name) + "REx"

    def _gen_eq_lemma(self, tf, cl):
        namer = self._namer(*[n for n, _, _ in cl.binders],
                            *[r.name for r in tf.rems],
                            *[s.ih for s in cl.sites],
                            *[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds])
        prv = [namer("p" + str(i + 1)) for i in range(len(cl.sites))]
        lhs = self._canon(tf, cl.pattern, self._rem_refs(tf))
        ty = TTpEq(lhs, cl.rhs_ih)
        for s, pn in zip(reversed(cl.sites), reversed(prv)):
            ty = TAll(pn, self._site_prem_ty(tf, s, TVar(s.ih)), ty)
            ty = TAll(s.ih, self._ih_kind(s), ty)
        for r in reversed(tf.rems):
            ty = TAll(r.name,
                      self._rem_cls_at(tf, r, cl.pattern,
                                       self._rem_refs(tf)), ty)
        for n, m, c in reversed(cl.binders):
            ty = TAll(n, c, ty)
        ty = self._wrap_pc(tf, ty)

        wit = self._relctor_tm(
            tf, cl,
            [TVar(n) if m == "type" else Var(n) for n, m, _ in cl.binders],
            self._rem_refs(tf), [TVar(s.ih) for s in cl.sites],
            [Var(pn) for pn in prv], cl.rhs_ih,
            AppT(Var("tpEqRefl"), cl.rhs_ih))
        fv = namer("f")
        yv = namer("y")
        vv = namer("v")
        xv = namer("X")
        wv = namer("w")
        fwd = IntrCast(Lam(fv, None, AppI(AppT(Var(fv), cl.rhs_ih), wit)),
                       Lam(yv, None, Beta()))
        ucall = AppI(self._lem_head(tf, _lc(tf.name) + "RUnique"),
                     cl.pattern)
        for r, ref in zip(tf.rems, self._rem_refs(tf)):
            ucall = AppI(ucall, ref) if r.form == "term" \
                else AppT(ucall, ref)
        ucall = App(AppT(ucall, cl.rhs_ih), wit)
        ucall = App(AppT(ucall, TVar(xv)), Var(wv))
        bwd = IntrCast(
            Lam(vv, None,
                LamI(xv, None,
                     LamI(wv, None, App(TpEq1(ucall), Var(vv))))),
            Lam(yv, None, Beta()))
        body = IntrTpEq(fwd, bwd)
        for s, pn in zip(reversed(cl.sites), reversed(prv)):
            body = LamI(s.ih, None, LamI(pn, None, body))
        for r in reversed(tf.rems):
            body = LamI(r.name, None, body)
        for n, _, _ in reversed(cl.binders):
            body = LamI(n, None, body)
        body = self._lam_pc(tf, body)
        self._declare(tf.decls, DefDecl(self._eq_name(tf, cl), ty, body))

    def _eq_call(self, tf, cl, bvals, remvals, ihvals, premvals):
        t = self._lem_head(tf, self._eq_name(tf, cl))
        for (n, m, _), v in zip(cl.binders, bvals):
            t = AppT(t, v) if m == "type" else AppI(t, v)
        for r, v in zip(tf.rems, remvals):
            t = AppI(t, v) if r.form == "term" else AppT(t, v)
        for ih, prem in zip(ihvals, premvals):
            t = AppI(AppT(t, ih), prem)
        return t

    def _rex_call(self, tf, rexhead, site):
        """An existence witness for one site premise."""
        call = App(rexhead, site.rec)
        for r, v in zip(tf.rems, site.rems):
            call = AppI(call, v) if r.form == "term" else AppT(call, v)
        if site.fam is None:
            return call
        return Lam(site.fam[0], None, call)

    def _gen_rex(self, tf):
        name = self._rex_name(tf)
        namer = self._namer(*[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds],
                            *self._all_binder_names(tf))
        i0v = namer(tf.i0)
        ty = self._relapp(tf, Var(i0v), self._rem_refs(tf),
                          self._canon(tf, Var(i0v), self._rem_refs(tf)))
        for r in reversed(tf.rems):
            ty = TAll(r.name,
                      self._rem_cls_at(tf, r, Var(i0v),
                                       self._rem_refs(tf)), ty)
        ty = TPi(i0v, tf.i0cls, ty)
        ty = self._wrap_pc(tf, ty)

        if not tf.dsig.indices:
            body = self._rex_plain(tf, namer)
        elif len(tf.dsig.indices) == 1 \
                and not _is_kind(tf.dsig.indices[0][1]) \
                and all(not cl.sites for cl in tf.clauses):
            body = self._rex_indexed(tf, namer, i0v)
        else:
            raise ElabError(
                "unsupported_match",
                f"cannot build an existence witness for '{tf.name}': "
                f"recursion over an indexed datatype is not supported")
        self._declare(tf.decls, DefDecl(name, ty, self._lam_pc(tf, body)))

    def _rex_plain(self, tf, namer):
        """Existence by structural recursion over an unindexed datatype."""
        rex = namer("rex")
        mv = namer("m")
        cont = self._relapp(tf, Var(mv), self._rem_refs(tf),
                            self._canon(tf, Var(mv), self._rem_refs(tf)))
        for r in reversed(tf.rems):
            cont = TAll(r.name,
                        self._rem_cls_at(tf, r, Var(mv),
                                         self._rem_refs(tf)), cont)
        motive = Motive((), mv, cont)
        branches = []
        for cl in tf.clauses:
            vars_ = tuple(BranchVar(n, m) for n, m, _ in cl.binders)
            ihvals = [self._site_canon(tf, s) for s in cl.sites]
            prems = [self._rex_call(tf, Var(rex), s) for s in cl.sites]
            bvals = [TVar(n) if m == "type" else Var(n)
                     for n, m, _ in cl.binders]
            xval = self._canon(tf, cl.pattern, self._rem_refs(tf))
            eq = self._eq_call(tf, cl, bvals, self._rem_refs(tf), ihvals,
                               prems)
            wit = self._relctor_tm(tf, cl, bvals, self._rem_refs(tf),
                                   ihvals, prems, xval, eq)
            body = wit
            for r in reversed(tf.rems):
                body = LamI(r.name, None, body)
            branches.append(Branch(cl.ctor, vars_, (), body))
        return Fix(rex, mv, motive, tuple(branches))

    def _rex_indexed(self, tf, namer, i0v):
        """Existence by a single match, transporting along the index.

        Supported when the matched datatype has exactly one term index and
        no clause recurses; forced constructor arguments must be erased
        and reachable through relevant positions of the index.
        """
        dsig = tf.dsig
        icls = self._cls_sub(dsig.indices[0][1],
                             {p: a for (p, _), (_, a)
                              in zip(dsig.params, tf.dpact)})
        diact0 = tf.diact[0][1]
        by_ctor = {cl.ctor: cl for cl in tf.clauses}
        for cl in tf.clauses:
            for n in cl.forced:
                marker = next(m for a, m, _ in dsig.ctor(cl.ctor).args
                              if a == n)
                if marker == "term":
                    raise ElabError(
                        "unsupported_match",
                        f"'{cl.ctor}' forces a relevant argument; its "
                        f"existence witness cannot be realigned")
        zv = namer("z")
        gv = namer("g")
        sv = namer("s")
        zq = namer("zq")
        dhead = TVar(dsig.name)
        for (p, cls), (_, a) in zip(dsig.params, tf.dpact):
            dhead = TAppT(dhead, a) if _is_kind(cls) else TAppTm(dhead, a)
        fam = TLam(zq, icls, TAppTm(dhead, Var(zq)))

        def coerce(idxval, eqv, target):
            prf = AppI(AppI(AppI(AppT(AppT(Var("famTpEq"), icls), fam),
                                 diact0), idxval), eqv)
            return App(TpEq2(prf), target)

        msc = coerce(Var(zv), Var(gv), Var(sv))
        mbody = self._relapp(tf, msc, self._rem_refs(tf),
                             self._canon(tf, msc, self._rem_refs(tf)))
        mbody = TAll(gv, TEq(diact0, Var(zv)), mbody)
        motive = Motive((zv,), sv, mbody)

        m_params = {p: a for (p, _), (_, a) in zip(dsig.params, tf.dpact)}
        branches = []
        for csig in dsig.ctors:
            cl = by_ctor.get(csig.name)
            bnamer = self._namer(*[p for p, _ in tf.params],
                                 *[cv for _, _, cv in tf.conds],
                                 *[r.name for r in tf.rems],
                                 *self._all_binder_names(tf), zv, gv, sv)
            g2 = bnamer("g")
            if cl is None:
                vs = tuple(BranchVar(bnamer(n), m)
                           for n, m, _ in csig.args)
                branches.append(Branch(csig.name, vs, (),
                                       LamI(g2, None, Delta(Var(g2)))))
                continue
            names = {}
            vs = []
            bi = 0
            for aname, marker, _ in csig.args:
                if aname in cl.forced:
                    names[aname] = bnamer(aname)
                else:
                    names[aname] = cl.binders[bi][0]
                    bi += 1
                vs.append(BranchVar(names[aname], marker))

            def ref(aname):
                marker = next(m for a, m, _ in csig.args if a == aname)
                return TVar(names[aname]) if marker == "type" \
                    else Var(names[aname])

            arm_sub = {a: ref(a) for a, _, _ in csig.args}
            idx_arm = subst(csig.result_indices[0][1],
                            {**m_params, **arm_sub})
            flinks = {}
            for fname, (fval, path) in cl.forced.items():
                if path is None:
                    continue
                prf = self._extract_eq(Var(g2), diact0, idx_arm, path)
                fcls = subst(next(c for a, _, c in csig.args
                                  if a == fname), m_params)
                flinks[fname] = _Link("term", fval, ref(fname), prf,
                                      fcls, fcls)
            bvals = []
            m_b = {}
            for aname, marker, cls in csig.args:
                if aname in cl.forced:
                    continue
                T = subst(cls, {**m_params, **m_b})
                needs = free_names(T) & set(cl.forced)
                val = ref(aname)
                if needs:
                    if marker != "term" or any(f not in flinks
                                               for f in needs):
                        raise ElabError(
                            "unsupported_match",
                            f"'{csig.name}': argument '{aname}' depends "
                            f"on a forced value that cannot be realigned")
                    lks = {f: flinks[f] for f in needs}
                    val = App(TpEq2(self._bridge(tf, T, lks).prf), val)
                m_b[aname] = ref(aname)
                bvals.append(val)
            pat_arm = Var(csig.name)
            for m, a in tf.dpact:
                pat_arm = AppT(pat_arm, a) if m == "type" \
                    else AppI(pat_arm, a)
            for aname, marker, _ in csig.args:
                pat_arm = _ap(pat_arm, marker, ref(aname))
            scrut_c = coerce(idx_arm, Var(g2), pat_arm)
            xval = self._canon(tf, scrut_c, self._rem_refs(tf))
            eq = self._eq_call(tf, cl, bvals, self._rem_refs(tf), [], [])
            wit = self._relctor_tm(tf, cl, bvals, self._rem_refs(tf), [],
                                   [], xval, eq)
            branches.append(Branch(csig.name, tuple(vs), (),
                                   LamI(g2, None, wit)))
        inner = AppI(Match(Var(i0v), motive, tuple(branches)), Beta())
        body = inner
        for r in reversed(tf.rems):
            body = LamI(r.name, None, body)
        return Lam(i0v, None, body)

    def _rhs_canon(self, tf, cl):
        """The clause right-hand side with recursion written canonically."""
        m = {s.ih: self._site_canon(tf, s) for s in cl.sites}
        return _subst_beta(cl.rhs_ih, m)

    def _gen_comp_laws(self, tf):
        for cl in tf.clauses:
            name = _lc(tf.name) + _uc(cl.ctor) + "C"
            lhs = self._canon(tf, cl.pattern, self._rem_refs(tf))
            rhs = self._rhs_canon(tf, cl)
            ty = TTpEq(lhs, rhs)
            for r in reversed(tf.rems):
                ty = TAll(r.name,
                          self._rem_cls_at(tf, r, cl.pattern,
                                           self._rem_refs(tf)), ty)
            for n, m, c in reversed(cl.binders):
                ty = TAll(n, c, ty)
            ty = self._wrap_pc(tf, ty)
            rexhead = self._lem_head(tf, self._rex_name(tf))
            ihvals = [self._site_canon(tf, s) for s in cl.sites]
            prems = [self._rex_call(tf, rexhead, s) for s in cl.sites]
            eq = self._eq_call(
                tf, cl,
                [TVar(n) if m == "type" else Var(n)
                 for n, m, _ in cl.binders],
                self._rem_refs(tf), ihvals, prems)
            body = AppI(AppT(AppT(Var("tpEqIrrel"), lhs), rhs), eq)
            for r in reversed(tf.rems):
                body = LamI(r.name, None, body)
            for n, _, _ in reversed(cl.binders):
                body = LamI(n, None, body)
            body = self._lam_pc(tf, body)
            self._declare(tf.decls, DefDecl(name, ty, body))

    def _gen_canon_resp(self, tf):
        if not tf.rems:
            return
        name = _lc(tf.name) + "Resp"
        namer = self._namer(*[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds])
        i0v = namer(tf.i0)
        rem1 = [namer(r.name) for r in tf.rems]
        rem2 = [namer(r.name + "2") for r in tf.rems]
        pwv = [namer("pw" + _uc(r.name)) for r in tf.rems]
        ref1 = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, rem1)]
        ref2 = [Var(n) if r.form == "term" else TVar(n)
                for r, n in zip(tf.rems, rem2)]
        cls1 = [self._rem_cls_at(tf, r, Var(i0v), ref1) for r in tf.rems]
        cls2 = [self._rem_cls_at(tf, r, Var(i0v), ref2) for r in tf.rems]
        lhs = self._canon(tf, Var(i0v), ref1)
        rhs = self._canon(tf, Var(i0v), ref2)
        ty = TTpEq(lhs, rhs)
        for r, pv, c1, c2, l, rr in reversed(list(zip(
                tf.rems, pwv, cls1, cls2, ref1, ref2))):
            ty = TAll(pv, self._pw_type(r, c1, c2, l, rr), ty)
        for r, n, c in reversed(list(zip(tf.rems, rem2, cls2))):
            ty = TAll(n, c, ty)
        for r, n, c in reversed(list(zip(tf.rems, rem1, cls1))):
            ty = TAll(n, c, ty)
        ty = TAll(i0v, tf.i0cls, ty)
        ty = self._wrap_pc(tf, ty)

        rexhead = self._lem_head(tf, self._rex_name(tf))

        def rexat(refs):
            call = App(rexhead, Var(i0v))
            for r, rf in zip(tf.rems, refs):
                call = AppI(call, rf) if r.form == "term" \
                    else AppT(call, rf)
            return call

        ucall = AppI(self._lem_head(tf, _lc(tf.name) + "RUniqueH"),
                     Var(i0v))
        for r, rf in zip(tf.rems, ref1):
            ucall = AppI(ucall, rf) if r.form == "term" \
                else AppT(ucall, rf)
        ucall = App(AppT(ucall, lhs), rexat(ref1))
        ucall = AppI(ucall, Var(i0v))
        for r, rf in zip(tf.rems, ref2):
            ucall = AppI(ucall, rf) if r.form == "term" \
                else AppT(ucall, rf)
        ucall = App(AppT(ucall, rhs), rexat(ref2))
        ucall = AppI(ucall, Beta())
        for pv in pwv:
            ucall = AppI(ucall, Var(pv))
        body = AppI(AppT(AppT(Var("tpEqIrrel"), lhs), rhs), ucall)
        for pv in reversed(pwv):
            body = LamI(pv, None, body)
        for n in reversed(rem1 + rem2):
            body = LamI(n, None, body)
        body = self._lam_pc(tf, LamI(i0v, None, body))
        self._declare(tf.decls, DefDecl(name, ty, body))

    # variant computation laws: rewrite a law's remaining index by the
    # canonical type of another typefun, so chains of laws compose without
    # manual respectfulness plumbing

    def _gen_variants(self, tf):
        if len(tf.rems) != 1 or tf.rems[0].form != "family":
            return
        for cl in tf.clauses:
            snap = self._snapshot()
            ndecl = len(tf.decls)
            try:
                self._gen_variant(tf, cl)
            except (ElabError, TypingError):
                self._rollback(snap)
                del tf.decls[ndecl:]

    def _gen_variant(self, tf, cl):
        r = tf.rems[0]
        dom_pat = subst(r.fdom, {tf.i0: cl.pattern})
        found = None
        for h in self.typefuns.values():
            if h.conds or h.rems or h.name == tf.name:
                continue
            sigma = {}
            if self._match_ty(h.i0cls, dom_pat,
                              {p for p, _ in h.params}, sigma):
                found = (h, sigma)
                break
        if found is None:
            raise ElabError("clause_shape", "no matching row constructor")
        H, sigma = found
        namer = self._namer(*[p for p, _ in tf.params],
                            *[cv for _, _, cv in tf.conds],
                            *[n for n, _, _ in cl.binders],
                            *[s.ih for s in cl.sites], r.name,
                            *self._all_binder_names(H))
        free_h = []
        for p, cls in H.params:
            if p not in sigma:
                nn = namer(p)
                free_h.append((nn, self._cls_sub(cls, sigma)))
                sigma[p] = TVar(nn) if _is_kind(cls) else Var(nn)
        hcanon = TVar(H.name)
        for p, cls in H.params:
            hcanon = TAppT(hcanon, sigma[p]) if _is_kind(cls) \
                else TAppTm(hcanon, sigma[p])

        base = self._rhs_canon(tf, cl)
        vb = self._vb(tf, cl, H, sigma, hcanon, base, r.name, namer)
        lhs = self._canon(tf, cl.pattern, [hcanon])
        ty = TTpEq(lhs, vb.right)
        for n, c in reversed(free_h):
            ty = TAll(n, c, ty)
        for n, m, c in reversed(cl.binders):
            ty = TAll(n, c, ty)
        ty = self._wrap_pc(tf, ty)

        basec = self._lem_head(tf, _lc(tf.name) + _uc(cl.ctor) + "C")
        for n, m, _ in cl.binders:
            basec = AppT(basec, TVar(n)) if m == "type" \
                else AppI(basec, Var(n))
        basec = AppT(basec, hcanon)
        step1 = _EqPrf(lhs, subst1(base, r.name, hcanon), basec)
        total = self._trans(step1, vb)
        body = AppI(AppT(AppT(Var("tpEqIrrel"), lhs), vb.right), total.prf)
        for n, _ in reversed(free_h):
            body = LamI(n, None, body)
        for n, _, _ in reversed(cl.binders):
            body = LamI(n, None, body)
        body = self._lam_pc(tf, body)
        name = _lc(tf.name) + _uc(cl.ctor) + "C'"
        self._declare(tf.decls, DefDecl(name, ty, body))

    def _match_ty(self, pat, tgt, bindable, sigma):
        """First-order matching of a type template against a target."""
        pat = subst(pat, sigma)
        if not (free_names(pat) & bindable):
            return alpha_eq(pat, tgt)
        if isinstance(pat, TVar) and pat.name in bindable:
            sigma[pat.name] = tgt
            return True
        if _is_type(pat) != _is_type(tgt):
            return False
        hp, ap = split_tapp(pat)
        ht, at = split_tapp(tgt)
        if not ap or len(ap) != len(at):
            return False
        if not (isinstance(hp, TVar) and isinstance(ht, TVar)
                and hp.name == ht.name):
            return False
        for (mp, vp), (mt, vt) in zip(ap, at):
            if mp != mt:
                return False
            ok = self._match_ty(vp, vt, bindable, sigma) if mp == "type" \
                else self._match_tm(vp, vt, bindable, sigma)
            if not ok:
                return False
        return True

    def _match_tm(self, pat, tgt, bindable, sigma):
        pat = subst(pat, sigma)
        if isinstance(pat, Var) and pat.name in bindable:
            sigma[pat.name] = tgt
            return True
        if not (free_names(pat) & bindable):
            return alpha_eq(pat, tgt)
        hp, ap = split_app(pat)
        ht, at = split_app(tgt)
        if not ap or len(ap) != len(at):
            return False
        if not (isinstance(hp, Var) and isinstance(ht, Var)
                and hp.name == ht.name):
            return False
        for (mp, vp), (mt, vt) in zip(ap, at):
            if mp != mt:
                return False
            ok = self._match_ty(vp, vt, bindable, sigma) if _is_type(vp) \
                else self._match_tm(vp, vt, bindable, sigma)
            if not ok:
                return False
        return True

    def _vb(self, tf, cl, H, sigma, hcanon, t, lname, namer) -> _EqPrf:
        """Bridge a type from row applications to their computed values."""
        if lname not in free_names(t):
            return self._refl(t)
        match t:
            case TAppTm(TVar(n), a) if n == lname:
                return self._vb_lapp(tf, H, sigma, hcanon, a, namer)
            case TPi(v, dom, cod) if v not in free_names(cod):
                d = self._vb(tf, cl, H, sigma, hcanon, dom, lname, namer)
                c = self._vb(tf, cl, H, sigma, hcanon, cod, lname, namer)
                prf = AppI(AppT(AppT(AppI(AppT(AppT(
                    Var("arrowTpEq"), d.left), d.right), d.prf), c.left),
                    c.right), c.prf)
                return _EqPrf(TPi(v, d.left, c.left),
                              TPi(v, d.right, c.right), prf)
            case TAppT(_, _) | TAppTm(_, _):
                return self._vb_spine(tf, cl, H, sigma, hcanon, t, lname,
                                      namer)
        raise ElabError("clause_shape",
                        "row application in an unsupported position")

    def _vb_lapp(self, tf, H, sigma, hcanon, a, namer) -> _EqPrf:
        for hcl in H.clauses:
            bound = [n for n, _, _ in hcl.binders]
            ren = {n: namer(n) for n in bound}
            pat = subst(hcl.pattern,
                        {**sigma, **{n: Var(ren[n]) for n in bound}})
            sub = {}
            if self._match_tm(pat, a, set(ren.values()), sub):
                bindings = {n: sub[ren[n]] for n in bound}
                rhs = subst(self._rhs_canon(H, hcl), {**sigma, **bindings})
                prf = Var(_lc(H.name) + _uc(hcl.ctor) + "C")
                for p, cls in H.params:
                    prf = AppT(prf, sigma[p]) if _is_kind(cls) \
                        else AppI(prf, sigma[p])
                for n, m, _ in hcl.binders:
                    v = bindings[n]
                    prf = AppT(prf, v) if m == "type" else AppI(prf, v)
                return _EqPrf(TAppTm(hcanon, a), rhs, prf)
        raise ElabError("clause_shape",
                        "a row application does not match any clause")

    def _vb_spine(self, tf, cl, H, sigma, hcanon, t, lname, namer) -> _EqPrf:
        head, args = split_tapp(t)
        if not isinstance(head, TVar):
            raise ElabError("clause_shape", "unsupported head")
        h = head.name
        conds = {p: cv for p, _, cv in tf.conds}
        if h == tf.name:
            return self._vb_site(tf, cl, H, sigma, hcanon, t, lname, namer)
        if h in conds:
            prf = Var(conds[h])
            L = R = head
            for _, a in args:
                p = self._vb(tf, cl, H, sigma, hcanon, a, lname, namer)
                prf = AppI(AppT(AppT(prf, p.left), p.right), p.prf)
                L, R = TAppT(L, p.left), TAppT(R, p.right)
            return _EqPrf(L, R, prf)
        rule = CONGRUENCES.get(h)
        if rule is None or len(args) != len(rule.positions):
            raise ElabError("clause_shape",
                            f"no congruence rule for the head '{h}'")
        prf = Var(rule.lemma)
        L = R = head
        for pos, (marker, a) in zip(rule.positions, args):
            if pos == "eq":
                p = self._vb(tf, cl, H, sigma, hcanon, a, lname, namer)
            elif pos == "pointwise":
                p = self._vb_pointwise(tf, cl, H, sigma, hcanon, a, lname,
                                       namer)
            else:
                if lname in free_names(a):
                    raise ElabError("clause_shape",
                                    "row application in a term slot")
                prf = AppI(prf, a)
                L, R = TAppTm(L, a), TAppTm(R, a)
                continue
            prf = AppI(AppT(AppT(prf, p.left), p.right), p.prf)
            L, R = TAppT(L, p.left), TAppT(R, p.right)
        return _EqPrf(L, R, prf)

    def _vb_pointwise(self, tf, cl, H, sigma, hcanon, a, lname,
                      namer) -> _EqPrf:
        if not isinstance(a, TLam):
            raise ElabError("clause_shape", "expected a type-level lambda")
        x1 = namer("x1")
        x2 = namer("x2")
        qx = namer("qx")
        p1 = self._vb(tf, cl, H, sigma, hcanon,
                      subst1(a.body, a.var, Var(x1)), lname, namer)
        template = self._vb(tf, cl, H, sigma, hcanon, a.body, lname,
                            namer).right
        lk = {a.var: _Link("term", Var(x1), Var(x2), Var(qx), a.dom,
                           a.dom)}
        p2 = self._bridge(tf, template, lk)
        total = self._trans(p1, p2)
        fn = Lam(x1, None, Lam(x2, None, Lam(qx, None, total.prf)))
        left = TLam(a.var, a.dom, subst1(a.body, lname, hcanon))
        right = _eta_tlam(TLam(a.var, a.dom, template))
        return _EqPrf(left, right, fn)

    def _vb_site(self, tf, cl, H, sigma, hcanon, t, lname, namer) -> _EqPrf:
        head, args = split_tapp(t)
        if len(args) == len(tf.params) + 2:
            args = args[len(tf.params):]
        if len(args) != 2:
            raise ElabError("clause_shape", "unexpected recursive arity")
        (_, rec), (_, remval) = args
        r = tf.rems[0]
        if lname in free_names(rec):
            raise ElabError("clause_shape",
                            "row application inside a matched index")
        if not isinstance(remval, TLam):
            iv = namer("i")
            remval = TLam(iv, self._cls_sub(r.fdom, {tf.i0: rec}),
                          _tapp1(remval, Var(iv)))
        pw = self._vb_pointwise(tf, cl, H, sigma, hcanon, remval, lname,
                                namer)
        rightfam = _eta_tlam(pw.right)
        resp = AppI(self._lem_head(tf, _lc(tf.name) + "Resp"), rec)
        resp = AppT(resp, pw.left)
        resp = AppT(resp, rightfam)
        resp = AppI(resp, pw.prf)
        return _EqPrf(self._canon(tf, rec, [pw.left]),
                      self._canon(tf, rec, [rightfam]), resp)

    # -- algfold

    def _algfold_analyze(self, d: AlgfoldDecl):
        ctx = self.ctx
        if d.scheme not in ctx.typedefs:
            raise ElabError("clause_shape",
                            f"'{d.scheme}' is not a declared type scheme")
        skind = ctx.typedefs[d.scheme][0]
        if not kind_conv(skind, KPi("_", KStar(), KStar()), ctx.env):
            raise ElabError("clause_shape",
                            f"scheme '{d.scheme}' must have kind * -> *")
        if d.mono not in ctx.defs:
            raise ElabError("clause_shape",
                            f"'{d.mono}' is not a defined term")
        mono_ty = ctx.defs[d.mono][0]
        want = TAppT(TVar("Monotonic"), TVar(d.scheme))
        if not type_conv(mono_ty, want, ctx.env):
            raise ElabError("clause_shape",
                            f"'{d.mono}' is not a monotonicity witness "
                            f"for '{d.scheme}'")
        alg = self.typefuns.get(d.alg)
        if alg is None:
            raise ElabError("clause_shape",
                            f"'{d.alg}' is not an elaborated typefun")
        rname = alg.params[0][0] if alg.params else ""
        for c in alg.surface_clauses:
            if self._r_at_type_level(c.rhs, rname):
                raise ElabError(
                    "relevant_occurrence",
                    f"the algebra '{d.alg}' uses its carrier '{rname}' "
                    f"directly; it may only reach it through the cast")
        mu = TMu(TVar(d.scheme))
        want_kind = KPi(
            "R", KStar(),
            KPi("c", TCast(TVar("R"), mu),
                KPi("Ih", KPi("r", TVar("R"), KStar()),
                    KPi("xs", TAppT(TVar(d.scheme), TVar("R")), KStar()))))
        got = alg.kind
        for p, cls in reversed(alg.params):
            got = KPi(p, cls, got)
        if not kind_conv(got, want_kind, ctx.env):
            raise ElabError("clause_shape",
                            f"the algebra '{d.alg}' does not have the "
                            f"algebra kind over '{d.scheme}'")
        if alg.conds:
            raise ElabError("clause_shape",
                            "an algebra may not carry side conditions")
        return alg

    def _r_at_type_level(self, ty, rname) -> bool:
        match ty:
            case TVar(n):
                return n == rname
            case TPi(_, d, c):
                return self._r_at_type_level(d, rname) \
                    or self._r_at_type_level(c, rname)
            case TAll(_, d, c) | TLam(_, d, c):
                dhit = False if _is_kind(d) \
                    else self._r_at_type_level(d, rname)
                return dhit or self._r_at_type_level(c, rname)
            case TAppT(f, a):
                return self._r_at_type_level(f, rname) \
                    or self._r_at_type_level(a, rname)
            case TAppTm(f, _):
                return self._r_at_type_level(f, rname)
            case TCast(a, b) | TTpEq(a, b):
                return self._r_at_type_level(a, rname) \
                    or self._r_at_type_level(b, rname)
            case TMu(f):
                return self._r_at_type_level(f, rname)
        return False

    def _elaborate_algfold(self, d: AlgfoldDecl):
        ctx = self.ctx
        alg = self._algfold_analyze(d)
        if d.algresp not in ctx.defs:
            raise ElabError("clause_shape",
                            f"'{d.algresp}' is not a defined term")
        mu = TMu(TVar(d.scheme))

        def F(x):
            return TAppT(TVar(d.scheme), x)

        def algapp(R, c, Ih, xs):
            return TAppTm(TAppT(TAppTm(TAppT(TVar(d.alg), R), c), Ih), xs)

        resp_want = self._algresp_type(d, mu, F, algapp)
        if not type_conv(ctx.defs[d.algresp][0], resp_want, ctx.env):
            raise ElabError(
                "clause_shape",
                f"'{d.algresp}' does not respect equality at the type "
                f"required for the algebra '{d.alg}'")

        N = _uc(d.name)
        rel = N + "R"
        base = _lc(N)
        cname = base + "RIn"
        out = []

        def relapp(x, X):
            return TAppT(TAppTm(TVar(rel), x), X)

        def inapp(R, c, xs):
            return App(AppI(AppT(AppI(Builtin("in"), Var(d.mono)), R), c),
                       xs)

        def castv(c, v):
            return App(CastElim(c), v)

        cty = relapp(inapp(TVar("R"), Var("c"), Var("xs")), TVar("X"))
        cty = TAll("_", TTpEq(TVar("X"),
                              algapp(TVar("R"), Var("c"), TVar("Ih"),
                                     Var("xs"))), cty)
        cty = TAll("X", KStar(), cty)
        cty = TPi("_", TPi("v", TVar("R"),
                           relapp(castv(Var("c"), Var("v")),
                                  TAppTm(TVar("Ih"), Var("v")))), cty)
        cty = TAll("Ih", KPi("v", TVar("R"), KStar()), cty)
        cty = TAll("xs", F(TVar("R")), cty)
        cty = TAll("c", TCast(TVar("R"), mu), cty)
        cty = TAll("R", KStar(), cty)
        kind = KPi("x", mu, KPi("_", KStar(), KStar()))
        self._declare(out, DataDecl(rel, (), kind, ((cname, cty),)))

        canon_body = TLam("x", mu,
                          TAll("X", KStar(),
                               TAll("_", relapp(Var("x"), TVar("X")),
                                    TVar("X"))))
        self._declare(out, TypeDecl(N, KPi("x", mu, KStar()), canon_body))

        def canonat(x):
            return TAppTm(TVar(N), x)

        def ctorapp(R, c, xs, Ih, rec, X, e):
            t = AppT(Var(cname), R)
            t = AppI(t, c)
            t = AppI(t, xs)
            t = AppT(t, Ih)
            t = App(t, rec)
            t = AppT(t, X)
            return AppI(t, e)

        # respectfulness: rebuild the witness at an equal result type
        rty = TAll("X2", KStar(),
                   TAll("_", TTpEq(TVar("X1"), TVar("X2")),
                        relapp(Var("x"), TVar("X2"))))
        rty = TPi("w", relapp(Var("x"), TVar("X1")), rty)
        rty = TAll("X1", KStar(), rty)
        rty = TAll("x", mu, rty)
        alg1 = algapp(TVar("R"), Var("c"), TVar("Ih"), Var("xs"))
        e2sym = AppI(AppT(AppT(Var("tpEqSym"), TVar("Xb")), TVar("X2")),
                     Var("e2"))
        echain = AppI(AppI(AppT(AppT(AppT(Var("tpEqTrans"), TVar("X2")),
                                     TVar("Xb")), alg1), e2sym), Var("e"))
        rbranch = Branch(
            cname,
            (BranchVar("R", "type"), BranchVar("c", "erased"),
             BranchVar("xs", "erased"), BranchVar("Ih", "type"),
             BranchVar("rec", "term"), BranchVar("Xb", "type"),
             BranchVar("e", "erased")),
            (),
            LamI("X2", None,
                 LamI("e2", None,
                      ctorapp(TVar("R"), Var("c"), Var("xs"), TVar("Ih"),
                              Var("rec"), TVar("X2"), echain))))
        rmotive = Motive(("xv", "Xv"), "v",
                         TAll("X2", KStar(),
                              TAll("_", TTpEq(TVar("Xv"), TVar("X2")),
                                   relapp(Var("xv"), TVar("X2")))))
        rbody = LamI("x", None,
                     LamI("X1", None,
                          Lam("w", None,
                              Match(Var("w"), rmotive, (rbranch,)))))
        self._declare(out, DefDecl(base + "RResp", rty, rbody))

        # uniqueness: any two witnesses at one value agree on the result
        uty = TPi("w2", relapp(Var("x"), TVar("X2")),
                  TTpEq(TVar("X1"), TVar("X2")))
        uty = TAll("X2", KStar(), uty)
        uty = TPi("w1", relapp(Var("x"), TVar("X1")), uty)
        uty = TAll("X1", KStar(), uty)
        uty = TAll("x", mu, uty)
        outm = AppI(Builtin("out"), Var(d.mono))
        qxs = Rho(Var("en"), "z",
                  TEq(App(outm, Var("z")), Var("xs2")), Beta())
        q3 = Rho(Var("qr"), "z",
                 TEq(castv(Var("c1"), Var("z")),
                     castv(Var("c2"), Var("r2"))),
                 Beta())
        w2p = Rho(q3, "z", relapp(Var("z"), TAppTm(TVar("Ih2"), Var("r2"))),
                  App(Var("rec2"), Var("r2")))
        ucall = AppI(Var("uq"), castv(Var("c1"), Var("r1")))
        ucall = AppT(ucall, TAppTm(TVar("Ih1"), Var("r1")))
        ucall = App(ucall, App(Var("rec1"), Var("r1")))
        ucall = AppT(ucall, TAppTm(TVar("Ih2"), Var("r2")))
        ucall = App(ucall, w2p)
        ihfn = Lam("r1", None, Lam("r2", None, Lam("qr", None, ucall)))
        eqA = Var(d.algresp)
        eqA = AppT(AppT(eqA, TVar("R1")), TVar("R2"))
        eqA = AppI(AppI(eqA, Var("c1")), Var("c2"))
        eqA = AppT(AppT(eqA, TVar("Ih1")), TVar("Ih2"))
        eqA = App(App(App(App(eqA, ihfn), Var("xs1")), Var("xs2")), qxs)
        algL = algapp(TVar("R1"), Var("c1"), TVar("Ih1"), Var("xs1"))
        algR = algapp(TVar("R2"), Var("c2"), TVar("Ih2"), Var("xs2"))
        e2s = AppI(AppT(AppT(Var("tpEqSym"), TVar("X2b")), algR), Var("e2"))
        goal = AppI(AppI(AppT(AppT(AppT(Var("tpEqTrans"), algL), algR),
                              TVar("X2b")), eqA), e2s)
        goal = AppI(AppI(AppT(AppT(AppT(Var("tpEqTrans"), TVar("X1b")),
                                   algL), TVar("X2b")), Var("e1")), goal)
        ibranch = Branch(
            cname,
            (BranchVar("R2", "type"), BranchVar("c2", "erased"),
             BranchVar("xs2", "erased"), BranchVar("Ih2", "type"),
             BranchVar("rec2", "term"), BranchVar("X2b", "type"),
             BranchVar("e2", "erased")),
            ("en",), goal)
        imotive = Motive(("xv2", "Xv2"), "v2",
                         TTpEq(TVar("X1b"), TVar("Xv2")))
        obranch = Branch(
            cname,
            (BranchVar("R1", "type"), BranchVar("c1", "erased"),
             BranchVar("xs1", "erased"), BranchVar("Ih1", "type"),
             BranchVar("rec1", "term"), BranchVar("X1b", "type"),
             BranchVar("e1", "erased")),
            (),
            LamI("X2", None,
                 Lam("w2", None, Match(Var("w2"), imotive, (ibranch,)))))
        umotive = Motive(("xv", "X1v"), "w1v",
                         TAll("X2", KStar(),
                              TPi("w2", relapp(Var("xv"), TVar("X2")),
                                  TTpEq(TVar("X1v"), TVar("X2")))))
        ubody = Fix("uq", "w1", umotive, (obranch,))
        self._declare(out, DefDecl(base + "RUnique", uty, ubody))

        # the computation law at the recursive constructor, equality form
        def ihdef(c):
            return TLam("v", TVar("R"), canonat(castv(c, Var("v"))))

        inx = inapp(TVar("R"), Var("c"), Var("xs"))
        ie_lhs = canonat(inx)
        ie_rhs = algapp(TVar("R"), Var("c"), TVar("Ih"), Var("xs"))
        iety = TTpEq(ie_lhs, ie_rhs)
        iety = TAll("rec", TPi("v", TVar("R"),
                               relapp(castv(Var("c"), Var("v")),
                                      TAppTm(TVar("Ih"), Var("v")))), iety)
        iety = TAll("Ih", KPi("v", TVar("R"), KStar()), iety)
        iety = TAll("xs", F(TVar("R")), iety)
        iety = TAll("c", TCast(TVar("R"), mu), iety)
        iety = TAll("R", KStar(), iety)
        wit = ctorapp(TVar("R"), Var("c"), Var("xs"), TVar("Ih"),
                      Var("rec"), ie_rhs, AppT(Var("tpEqRefl"), ie_rhs))
        u1 = AppI(Var(base + "RUnique"), inx)
        u1 = App(AppT(u1, ie_rhs), wit)
        u1 = App(AppT(u1, TVar("X")), Var("w"))
        fwd = IntrCast(Lam("f", None, AppI(AppT(Var("f"), ie_rhs), wit)),
                       Lam("y", None, Beta()))
        bwd = IntrCast(
            Lam("v", None,
                LamI("X", None,
                     LamI("w", None, App(TpEq1(u1), Var("v"))))),
            Lam("y", None, Beta()))
        iebody = IntrTpEq(fwd, bwd)
        for b in ("rec", "Ih", "xs", "c", "R"):
            iebody = LamI(b, None, iebody)
        self._declare(out, DefDecl(base + "InEq", iety, iebody))

        # existence, by induction over the recursive layer
        rexty = TPi("x", mu, relapp(Var("x"), canonat(Var("x"))))
        P = TLam("v", mu, relapp(Var("v"), canonat(Var("v"))))
        ie = Var(base + "InEq")
        ie = AppT(ie, TVar("R"))
        ie = AppI(ie, Var("c"))
        ie = AppI(ie, Var("xs"))
        ie = AppT(ie, ihdef(Var("c")))
        ie = AppI(ie, Var("rec"))
        step = LamI(
            "R", None,
            LamI("c", None,
                 Lam("rec", None,
                     Lam("xs", None,
                         ctorapp(TVar("R"), Var("c"), Var("xs"),
                                 ihdef(Var("c")), Var("rec"),
                                 canonat(inapp(TVar("R"), Var("c"),
                                               Var("xs"))), ie)))))
        rexbody = Lam("x", None,
                      App(App(AppT(AppI(Builtin("ind"), Var(d.mono)), P),
                              step), Var("x")))
        self._declare(out, DefDecl(base + "REx", rexty, rexbody))

        # and in coercion-ready form
        icty = TTpEq(canonat(inapp(TVar("R"), Var("c"), Var("xs"))),
                     algapp(TVar("R"), Var("c"), ihdef(Var("c")),
                            Var("xs")))
        icty = TAll("xs", F(TVar("R")), icty)
        icty = TAll("c", TCast(TVar("R"), mu), icty)
        icty = TAll("R", KStar(), icty)
        ie2 = Var(base + "InEq")
        ie2 = AppT(ie2, TVar("R"))
        ie2 = AppI(ie2, Var("c"))
        ie2 = AppI(ie2, Var("xs"))
        ie2 = AppT(ie2, ihdef(Var("c")))
        ie2 = AppI(ie2, Lam("v", None,
                            App(Var(base + "REx"),
                                castv(Var("c"), Var("v")))))
        icbody = AppI(AppT(AppT(Var("tpEqIrrel"),
                                canonat(inapp(TVar("R"), Var("c"),
                                              Var("xs")))),
                           algapp(TVar("R"), Var("c"), ihdef(Var("c")),
                                  Var("xs"))), ie2)
        icbody = LamI("R", None, LamI("c", None, LamI("xs", None, icbody)))
        self._declare(out, DefDecl(base + "InC", icty, icbody))
        return out

    def _algresp_type(self, d, mu, F, algapp):
        e = TTpEq(algapp(TVar("R1"), Var("c1"), TVar("Ih1"), Var("xs1")),
                  algapp(TVar("R2"), Var("c2"), TVar("Ih2"), Var("xs2")))
        e = TPi("q2", TEq(Var("xs1"), Var("xs2")), e)
        e = TPi("xs2", F(TVar("R2")), e)
        e = TPi("xs1", F(TVar("R1")), e)
        ihf = TPi("r1", TVar("R1"),
                  TPi("r2", TVar("R2"),
                      TPi("q", TEq(Var("r1"), Var("r2")),
                          TTpEq(TAppTm(TVar("Ih1"), Var("r1")),
                                TAppTm(TVar("Ih2"), Var("r2"))))))
        e = TPi("ihf", ihf, e)
        e = TAll("Ih2", KPi("r", TVar("R2"), KStar()), e)
        e = TAll("Ih1", KPi("r", TVar("R1"), KStar()), e)
        e = TAll("c2", TCast(TVar("R2"), mu), e)
        e = TAll("c1", TCast(TVar("R1"), mu), e)
        e = TAll("R2", KStar(), e)
        e = TAll("R1", KStar(), e)
        return e
