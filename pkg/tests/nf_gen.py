"""Seeded generator for closed beta-normal erased terms.

Builds terms directly from the normal-form grammar (abstractions,
constructor forms, variable-headed spines), then eta-normalizes; the result
is a closed beta-eta-normal form of bounded size.
"""

import random

from lesim.conversion import Normalizer
from lesim.core import PApp, PCtor, PLam, PVar, papps

CTOR_NAMES = ["zero", "succ", "nil", "cons", "mk"]


def term_size(t) -> int:
    match t:
        case PVar(_):
            return 1
        case PLam(_, b):
            return 1 + term_size(b)
        case PApp(f, a):
            return 1 + term_size(f) + term_size(a)
        case PCtor(_, args):
            return 1 + sum(term_size(a) for a in args)
    raise AssertionError(t)


def _gen(rng: random.Random, bound: tuple, budget: int):
    choices = ["lam", "ctor"]
    if bound:
        choices += ["var", "var", "spine"]
    if budget <= 2:
        choices = ["var", "ctor"] if bound else ["ctor"]
    match rng.choice(choices):
        case "lam":
            v = f"x{len(bound)}"
            return PLam(v, _gen(rng, bound + (v,), budget - 1))
        case "var":
            return PVar(rng.choice(bound))
        case "ctor":
            name = rng.choice(CTOR_NAMES)
            n = rng.randint(0, min(2, max(0, (budget - 1) // 2)))
            return PCtor(name, tuple(_gen(rng, bound, budget // (n + 1)) for _ in range(n)))
        case "spine":
            head = PVar(rng.choice(bound))
            n = rng.randint(1, 2)
            return papps(head, [_gen(rng, bound, budget // (n + 1)) for _ in range(n)])
    raise AssertionError


def gen_closed_nf(rng: random.Random, max_size: int = 12):
    while True:
        t = _gen(rng, (), rng.randint(2, max_size))
        t = Normalizer(fuel=10000).normalize(t)  # eta only: t has no beta redex
        if term_size(t) <= max_size:
            return t
