"""Instantial neighbourhood formulas and their syntactic predicates.

``Box(inst, univ)`` is the n+1-ary modality: some neighbourhood satisfies
``univ`` everywhere and each formula of ``inst`` somewhere.  ``Implies`` and
``Iff`` are kept as nodes for printing, but every predicate here looks at
their expansion into ``Not``/``Or``/``And``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Mapping, Union


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Box:
    inst: tuple["Formula", ...]
    univ: "Formula"

    def __post_init__(self):
        # accept lists from callers; equality stays structural and ordered
        if not isinstance(self.inst, tuple):
            object.__setattr__(self, "inst", tuple(self.inst))

    @property
    def arity(self) -> int:
        return len(self.inst)


Formula = Union[Prop, Top, Bot, Not, And, Or, Implies, Iff, Box]

TOP = Top()
BOT = Bot()


def conj(*args: Formula) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``TOP``."""
    if not args:
        return TOP
    out = args[0]
    for a in args[1:]:
        out = And(out, a)
    return out


def disj(*args: Formula) -> Formula:
    if not args:
        return BOT
    out = args[0]
    for a in args[1:]:
        out = Or(out, a)
    return out


def nabla(arg: Formula, theta: Formula) -> Formula:
    """The derived unary box ``~Box(~arg; theta)``."""
    return Not(Box((Not(arg),), theta))


def expand(phi: Formula) -> Formula:
    """Rewrite every ``Implies``/``Iff`` into ``Not``/``Or``/``And``."""
    if isinstance(phi, (Prop, Top, Bot)):
        return phi
    if isinstance(phi, Not):
        return Not(expand(phi.arg))
    if isinstance(phi, And):
        return And(expand(phi.left), expand(phi.right))
    if isinstance(phi, Or):
        return Or(expand(phi.left), expand(phi.right))
    if isinstance(phi, Implies):
        return Or(Not(expand(phi.left)), expand(phi.right))
    if isinstance(phi, Iff):
        a, b = expand(phi.left), expand(phi.right)
        return And(Or(Not(a), b), Or(Not(b), a))
    if isinstance(phi, Box):
        return Box(tuple(expand(a) for a in phi.inst), expand(phi.univ))
    raise TypeError(f"not an INL formula: {phi!r}")


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, Not):
        return (phi.arg,)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return (phi.left, phi.right)
    if isinstance(phi, Box):
        return phi.inst + (phi.univ,)
    return ()


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    for c in children(phi):
        yield from subformulas(c)


def variables(phi: Formula) -> list[str]:
    """Propositional variables of ``phi`` in sorted order."""
    return sorted({s.name for s in subformulas(phi) if isinstance(s, Prop)})


def depth(phi: Formula) -> int:
    cs = children(phi)
    return 0 if not cs else 1 + max(depth(c) for c in cs)


class Polarity(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    BOTH = "Both"
    ABSENT = "Absent"

    def flip(self) -> "Polarity":
        if self is Polarity.POSITIVE:
            return Polarity.NEGATIVE
        if self is Polarity.NEGATIVE:
            return Polarity.POSITIVE
        return self


def _parities(phi: Formula, p: str, odd: bool, out: set[bool]) -> None:
    # every Box coordinate is a monotone position
    if isinstance(phi, Prop):
        if phi.name == p:
            out.add(odd)
    elif isinstance(phi, Not):
        _parities(phi.arg, p, not odd, out)
    elif isinstance(phi, Implies):
        _parities(phi.left, p, not odd, out)
        _parities(phi.right, p, odd, out)
    elif isinstance(phi, Iff):
        for side in (phi.left, phi.right):
            _parities(side, p, odd, out)
            _parities(side, p, not odd, out)
    else:
        for c in children(phi):
            _parities(c, p, odd, out)


def polarity(phi: Formula, p: str) -> Polarity:
    found: set[bool] = set()
    _parities(phi, p, False, found)
    if not found:
        return Polarity.ABSENT
    if found == {False}:
        return Polarity.POSITIVE
    if found == {True}:
        return Polarity.NEGATIVE
    return Polarity.BOTH


def is_positive(phi: Formula) -> bool:
    return all(polarity(phi, p) is Polarity.POSITIVE for p in variables(phi))


def is_negative(phi: Formula) -> bool:
    return all(polarity(phi, p) is Polarity.NEGATIVE for p in variables(phi))


def is_pure(phi: Formula) -> bool:
    return not any(isinstance(s, Prop) for s in subformulas(phi))


def nabla_parts(phi: Formula) -> tuple[Formula, Formula] | None:
    """Return ``(arg, theta)`` if ``phi`` is ``~Box(~arg; theta)`` with theta pure."""
    if (
        isinstance(phi, Not)
        and isinstance(phi.arg, Box)
        and phi.arg.arity == 1
        and isinstance(phi.arg.inst[0], Not)
        and is_pure(phi.arg.univ)
    ):
        return phi.arg.inst[0].arg, phi.arg.univ
    return None


def is_pseudo_boxed_atom(phi: Formula) -> bool:
    if isinstance(phi, (Prop, Top, Bot)):
        return True
    if isinstance(phi, And):
        return is_pseudo_boxed_atom(phi.left) and is_pseudo_boxed_atom(phi.right)
    parts = nabla_parts(phi)
    return parts is not None and is_pseudo_boxed_atom(parts[0])


def substitute_props(phi: Formula, binding: Mapping[str, Formula]) -> Formula:
    """Simultaneous replacement of propositional variables."""
    if isinstance(phi, Prop):
        return binding.get(phi.name, phi)
    if isinstance(phi, (Top, Bot)):
        return phi
    if isinstance(phi, Not):
        return Not(substitute_props(phi.arg, binding))
    if isinstance(phi, Box):
        return Box(
            tuple(substitute_props(a, binding) for a in phi.inst),
            substitute_props(phi.univ, binding),
        )
    return type(phi)(substitute_props(phi.left, binding), substitute_props(phi.right, binding))
