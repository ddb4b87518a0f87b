"""Membership in the three INL-Sahlqvist tiers, with role-tagged decompositions.

A node that fits several grammar clauses takes the clause of the lowest tier,
and inside a tier the first clause of the grammar.  A pure universal
coordinate is always read as a normal-diamond guard, never as a negative
formula.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from inlcorr.formula import (
    And,
    Bot,
    Box,
    Formula,
    Implies,
    Or,
    Prop,
    Top,
    expand,
    is_negative,
    is_positive,
    is_pseudo_boxed_atom,
    is_pure,
)


class Verdict(enum.IntEnum):
    VERY_SIMPLE = 1
    SIMPLE = 2
    FULL = 3
    NOT_SAHLQVIST = 4

    @property
    def label(self) -> str:
        return {1: "VerySimple", 2: "Simple", 3: "Full", 4: "NotSahlqvist"}[self.value]


class Role(enum.Enum):
    PROP = "prop"
    TOP = "top"
    BOT = "bot"
    PBA = "pseudo-boxed-atom"
    NEGATIVE = "negative"
    THETA = "pure-theta"
    DELTA = "delta"
    BOX_ZETA = "box-zeta"
    BOX_GAMMA = "box-gamma"
    AND = "and"
    OR = "or"


BOX_ROLES = (Role.DELTA, Role.BOX_ZETA, Role.BOX_GAMMA)
ZETA_ROLES = (Role.PROP, Role.TOP, Role.BOT, Role.PBA)


@dataclass(frozen=True)
class Node:
    """One antecedent node tagged with the grammar clause it matched.

    Box roles keep the instantial nodes first and the universal leaf last.
    """

    role: Role
    formula: Formula
    children: tuple["Node", ...] = ()

    def to_json(self) -> dict:
        from inlcorr.parser import print_inl

        out: dict = {"role": self.role.value, "formula": print_inl(self.formula)}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out


@dataclass(frozen=True)
class SahlqvistClass:
    verdict: Verdict
    decomposition: Node | None = None
    antecedent: Formula | None = None
    consequent: Formula | None = None
    reason: str = ""

    @property
    def is_sahlqvist(self) -> bool:
        return self.verdict is not Verdict.NOT_SAHLQVIST

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict.label}
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_json()
        if self.reason:
            out["reason"] = self.reason
        return out


def _zeta_leaf(phi: Formula) -> Node:
    if isinstance(phi, Prop):
        return Node(Role.PROP, phi)
    if isinstance(phi, Top):
        return Node(Role.TOP, phi)
    if isinstance(phi, Bot):
        return Node(Role.BOT, phi)
    return Node(Role.PBA, phi)


def match(phi: Formula, tier: Verdict) -> Node | None:
    """Decompose ``phi`` as an antecedent of ``tier``; ``None`` if it does not fit.

    ``phi`` must already be free of ``Implies``/``Iff`` (see :func:`expand`).
    """
    if tier >= Verdict.SIMPLE and is_pseudo_boxed_atom(phi):
        return _zeta_leaf(phi)
    if tier is Verdict.FULL and is_negative(phi):
        return Node(Role.NEGATIVE, phi)
    if isinstance(phi, (Prop, Top, Bot)):
        return _zeta_leaf(phi)
    if isinstance(phi, And):
        left, right = match(phi.left, tier), match(phi.right, tier)
        return None if left is None or right is None else Node(Role.AND, phi, (left, right))
    if isinstance(phi, Or) and tier is Verdict.FULL:
        left, right = match(phi.left, tier), match(phi.right, tier)
        return None if left is None or right is None else Node(Role.OR, phi, (left, right))
    if isinstance(phi, Box):
        inst = [match(a, tier) for a in phi.inst]
        if any(i is None for i in inst):
            return None
        u = phi.univ
        if is_pure(u):
            return Node(Role.DELTA, phi, (*inst, Node(Role.THETA, u)))
        if tier is Verdict.VERY_SIMPLE:
            if isinstance(u, Prop):
                return Node(Role.BOX_ZETA, phi, (*inst, Node(Role.PROP, u)))
            return None
        if is_pseudo_boxed_atom(u):
            return Node(Role.BOX_ZETA, phi, (*inst, _zeta_leaf(u)))
        if tier is Verdict.FULL and is_negative(u):
            return Node(Role.BOX_GAMMA, phi, (*inst, Node(Role.NEGATIVE, u)))
    return None


def is_very_simple_antecedent(phi: Formula) -> Node | None:
    return match(expand(phi), Verdict.VERY_SIMPLE)


def is_simple_antecedent(phi: Formula) -> Node | None:
    return match(expand(phi), Verdict.SIMPLE)


def is_inl_sahlqvist_antecedent(phi: Formula) -> Node | None:
    return match(expand(phi), Verdict.FULL)


def classify(formula: Formula) -> SahlqvistClass:
    """Lowest tier whose grammar accepts the implication ``formula``."""
    if not isinstance(formula, Implies):
        return SahlqvistClass(Verdict.NOT_SAHLQVIST, reason="not an implication")
    ant, cons = formula.left, formula.right
    if not is_positive(cons):
        return SahlqvistClass(
            Verdict.NOT_SAHLQVIST, antecedent=ant, consequent=cons, reason="consequent is not positive"
        )
    flat = expand(ant)
    for tier in (Verdict.VERY_SIMPLE, Verdict.SIMPLE, Verdict.FULL):
        node = match(flat, tier)
        if node is not None:
            return SahlqvistClass(tier, node, flat, cons)
    return SahlqvistClass(
        Verdict.NOT_SAHLQVIST, antecedent=ant, consequent=cons, reason="antecedent fits no tier"
    )
