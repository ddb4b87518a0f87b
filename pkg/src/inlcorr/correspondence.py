"""First-order local correspondents by minimal valuation, straight from ST.

The antecedent is brought into the shape

    OR_i  exists Xs ys (REL_i & AT_i & NEG_i)

where ``REL_i`` is predicate free, ``AT_i`` lists the atoms the minimal
valuation reads off, and ``NEG_i`` is negative in every predicate.  The
correspondent is then

    AND_i forall Xs ys (REL_i -> [sigma_i/P](~NEG_i | ST_x(consequent))).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Union

from inlcorr import fo
from inlcorr.classifier import BOX_ROLES, Node, Role, classify
from inlcorr.formula import And, Bot, Formula, Prop, Top, nabla_parts
from inlcorr.translation import st


class NotSahlqvistError(ValueError):
    def __init__(self, verdict):
        self.verdict = verdict
        reason = getattr(verdict, "reason", "")
        super().__init__(f"not an INL-Sahlqvist formula{': ' + reason if reason else ''}")


class MalformedDecomposition(ValueError):
    pass


@dataclass(frozen=True)
class PointOcc:
    """``P(var)`` in the antecedent."""

    pred: str
    var: fo.Var


@dataclass(frozen=True)
class SetOcc:
    """``forall hole (guard -> P(hole))`` with a predicate-free guard."""

    pred: str
    hole: fo.Var
    guard: fo.FOFormula


Occurrence = Union[PointOcc, SetOcc]


@dataclass(frozen=True)
class Disjunct:
    exists: tuple[fo.Var, ...] = ()
    rel: tuple[fo.FOFormula, ...] = ()
    at: tuple[Occurrence, ...] = ()
    neg: tuple[fo.FOFormula, ...] = ()

    def __add__(self, other: "Disjunct") -> "Disjunct":
        return Disjunct(
            self.exists + other.exists,
            self.rel + other.rel,
            self.at + other.at,
            self.neg + other.neg,
        )

    def formula(self) -> fo.FOFormula:
        """The disjunct as the existential first-order formula it abbreviates."""
        ats = [
            fo.Pred(o.pred, o.var) if isinstance(o, PointOcc)
            else fo.Forall(o.hole, fo.Implies(o.guard, fo.Pred(o.pred, o.hole)))
            for o in self.at
        ]
        return fo.exists_all(self.exists, fo.conj(*self.rel, *ats, *self.neg))


@dataclass(frozen=True)
class AntecedentNormalForm:
    x: fo.Var
    disjuncts: tuple[Disjunct, ...] = field(default_factory=tuple)

    def formula(self) -> fo.FOFormula:
        return fo.disj(*(d.formula() for d in self.disjuncts))


def _product(groups: list[list[Disjunct]]) -> list[Disjunct]:
    out = []
    for combo in itertools.product(*groups):
        acc = Disjunct()
        for d in combo:
            acc = acc + d
        out.append(acc)
    return out


def _theta_integrity(X: fo.Var, theta: Formula, fresh: fo.Fresh) -> fo.FOFormula:
    v = fresh.world()
    return fo.Forall(v, fo.Implies(fo.RelNi(X, v), st(theta, v, fresh)))


def _lift(occs, rels, v: fo.Var, prefix: fo.FOFormula, bound: tuple[fo.Var, ...], fresh: fo.Fresh):
    """Push AT occurrences found at ``v`` through a universal step ``forall bound (prefix -> .)``.

    ``prefix`` mentions ``v``, which is the last variable of ``bound``.
    """
    new_occs: list[Occurrence] = []
    for o in occs:
        if isinstance(o, PointOcc):
            if o.var != v:
                raise MalformedDecomposition(f"stray point occurrence {o}")
            h = fresh.hole()
            guard = fo.exists_all(bound[:-1], fo.rename_free(prefix, {v: h}))
            new_occs.append(SetOcc(o.pred, h, guard))
        else:
            new_occs.append(SetOcc(o.pred, o.hole, fo.exists_all(bound, fo.conj(prefix, o.guard))))
    new_rels = [fo.forall_all(bound, fo.Implies(prefix, c)) for c in rels]
    return new_occs, new_rels


def pba_occurrences(zeta: Formula, t: fo.Var, fresh: fo.Fresh) -> tuple[list[Occurrence], list[fo.FOFormula]]:
    """AT occurrences and predicate-free side conditions of ``ST_t(zeta)``."""
    if isinstance(zeta, Prop):
        return [PointOcc(zeta.name, t)], []
    if isinstance(zeta, Top):
        return [], []
    if isinstance(zeta, Bot):
        # AT(t) = t != t folds to falsum
        return [], [fo.FALSE]
    if isinstance(zeta, And):
        o1, r1 = pba_occurrences(zeta.left, t, fresh)
        o2, r2 = pba_occurrences(zeta.right, t, fresh)
        return o1 + o2, r1 + r2
    parts = nabla_parts(zeta)
    if parts is None:
        raise MalformedDecomposition(f"not a pseudo-boxed atom: {zeta!r}")
    arg, theta = parts
    X, y1 = fresh.subset(), fresh.world()
    prefix = fo.conj(fo.RelN(t, X), fo.RelNi(X, y1), _theta_integrity(X, theta, fresh))
    occs, rels = pba_occurrences(arg, y1, fresh)
    return _lift(occs, rels, y1, prefix, (X, y1), fresh)


def _nf(node: Node, t: fo.Var, fresh: fo.Fresh) -> list[Disjunct]:
    role = node.role
    if role is Role.TOP:
        return [Disjunct()]
    if role is Role.BOT:
        return []
    if role in (Role.PROP, Role.PBA):
        occs, rels = pba_occurrences(node.formula, t, fresh)
        return [Disjunct(rel=tuple(rels), at=tuple(occs))]
    if role is Role.NEGATIVE:
        return [Disjunct(neg=(st(node.formula, t, fresh),))]
    if role is Role.AND:
        if len(node.children) != 2:
            raise MalformedDecomposition("conjunction node needs two children")
        return _product([_nf(c, t, fresh) for c in node.children])
    if role is Role.OR:
        if len(node.children) != 2:
            raise MalformedDecomposition("disjunction node needs two children")
        return _nf(node.children[0], t, fresh) + _nf(node.children[1], t, fresh)
    if role in BOX_ROLES:
        *inst, univ = node.children
        X = fresh.subset()
        ys = [fresh.world() for _ in inst]
        head = Disjunct(exists=(X, *ys), rel=(fo.RelN(t, X), *(fo.RelNi(X, y) for y in ys)))
        if role is Role.DELTA:
            if univ.role is not Role.THETA:
                raise MalformedDecomposition("delta node needs a pure universal coordinate")
            head += Disjunct(rel=(_theta_integrity(X, univ.formula, fresh),))
        elif role is Role.BOX_GAMMA:
            if univ.role is not Role.NEGATIVE:
                raise MalformedDecomposition("box-gamma node needs a negative universal coordinate")
            v = fresh.world()
            head += Disjunct(neg=(fo.Forall(v, fo.Implies(fo.RelNi(X, v), st(univ.formula, v, fresh))),))
        else:
            if univ.role not in (Role.PROP, Role.TOP, Role.BOT, Role.PBA):
                raise MalformedDecomposition("box-zeta node needs a pseudo-boxed universal coordinate")
            v = fresh.world()
            occs, rels = pba_occurrences(univ.formula, v, fresh)
            occs, rels = _lift(occs, rels, v, fo.RelNi(X, v), (v,), fresh)
            head += Disjunct(rel=tuple(rels), at=tuple(occs))
        return _product([[head]] + [_nf(c, y, fresh) for c, y in zip(inst, ys)])
    raise MalformedDecomposition(f"unexpected role {role} at antecedent position")


def antecedent_normal_form(node: Node, x: fo.Var | None = None, fresh: fo.Fresh | None = None) -> AntecedentNormalForm:
    """Normal form of ``ST_x`` of a decomposed antecedent."""
    x = x or fo.wvar("x")
    return AntecedentNormalForm(x, tuple(_nf(node, x, fresh or fo.Fresh())))


HOLE = fo.wvar("u")


def minimal_valuation(nf: AntecedentNormalForm, index: int, pred: str) -> fo.PredicateDescriptor:
    """Least interpretation of ``pred`` making disjunct ``index`` true."""
    parts: list[fo.FOFormula] = []
    for o in nf.disjuncts[index].at:
        if o.pred != pred:
            continue
        if isinstance(o, PointOcc):
            parts.append(fo.Eq(HOLE, o.var))
        else:
            parts.append(fo.rename_free(o.guard, {o.hole: HOLE}))
    if not parts:
        return fo.PredicateDescriptor(HOLE, fo.Not(fo.Eq(HOLE, HOLE)))
    return fo.PredicateDescriptor(HOLE, fo.disj(*parts))


def assemble(nf: AntecedentNormalForm, consequent: fo.FOFormula) -> fo.FOFormula:
    """``AND_i forall (REL_i -> [sigma/P](~NEG_i | consequent))``, unsimplified."""
    conjuncts = []
    for i, d in enumerate(nf.disjuncts):
        target = fo.disj(fo.Not(fo.conj(*d.neg)), consequent) if d.neg else consequent
        for p in sorted(fo.predicates(target)):
            target = fo.substitute_predicate(target, p, minimal_valuation(nf, i, p))
        conjuncts.append(fo.forall_all(d.exists, fo.Implies(fo.conj(*d.rel), target)))
    return fo.conj(*conjuncts)


def correspondent_direct(formula: Formula, x: fo.Var | None = None, simplify: bool = True) -> fo.FOFormula:
    """Local first-order correspondent ``alpha(x)`` of an INL-Sahlqvist implication."""
    cls = classify(formula)
    if not cls.is_sahlqvist:
        raise NotSahlqvistError(cls)
    x = x or fo.wvar("x")
    fresh = fo.Fresh()
    nf = antecedent_normal_form(cls.decomposition, x, fresh)
    alpha = assemble(nf, st(cls.consequent, x, fresh))
    return fo.simplify_fo(alpha) if simplify else alpha
