"""Bundled prelude: base datatypes and the equality toolkit.

The prelude is ordinary surface syntax kept in prelude.les and pushed through
the kernel like any user file.  Loading it is therefore a (cheap) proof check.
"""

from dataclasses import dataclass
from importlib import resources

from .kernel import Context, declare_data, declare_def, declare_typedef
from .surface import DataDecl, DefDecl, TypeDecl, parse_program


def prelude_source() -> str:
    return resources.files("lesim").joinpath("prelude.les").read_text()


def load_prelude(ctx: Context) -> None:
    for d in parse_program(prelude_source()):
        match d:
            case DefDecl(name, ty, body):
                declare_def(ctx, name, ty, body)
            case TypeDecl(name, kind, body):
                declare_typedef(ctx, name, kind, body)
            case DataDecl(name, params, kind, ctors):
                declare_data(ctx, name, params, kind, ctors)
            case _:
                raise AssertionError(f"prelude cannot hold {type(d).__name__}")


def standard_context(fuel: int = 100000) -> Context:
    ctx = Context(fuel=fuel)
    load_prelude(ctx)
    return ctx


@dataclass(frozen=True)
class CongruenceRule:
    """How a type former tracks extensional equality of its arguments.

    positions has one entry per head argument, in application order:
      "eq"          type may vary, lemma takes [old] [new] -proof
      "pointwise"   single-argument family, lemma takes [old] [new] -pw where
                    pw : Pi x1: D1. Pi x2: D2. {x1 ~ x2} -> TpEq [old x1] [new x2]
      "term"        term argument, lemma takes it once (erased); a change in
                    this slot is bridged separately through famTpEq
    The lemma binds its arguments grouped per position, in this order.
    """

    lemma: str
    positions: tuple


# "->" stands in for any non-dependent function type
CONGRUENCES = {
    "->": CongruenceRule("arrowTpEq", ("eq", "eq")),
    "Pair": CongruenceRule("pairTpEq", ("eq", "eq")),
    "Sum": CongruenceRule("sumTpEq", ("eq", "eq")),
    "Sigma": CongruenceRule("sigTpEq", ("eq", "pointwise")),
    "Vec": CongruenceRule("vecTpEq", ("eq", "term")),
}
