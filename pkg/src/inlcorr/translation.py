"""Standard translation of INL formulas into the two-sorted first-order language."""

from __future__ import annotations

from inlcorr import fo
from inlcorr.formula import And, Bot, Box, Formula, Iff, Implies, Not, Or, Prop, Top


def st(phi: Formula, x: fo.Var, fresh: fo.Fresh | None = None) -> fo.FOFormula:
    """``ST_x(phi)``, literally, without simplification.

    A box becomes ``exists X (R_N(x,X) & forall y (R_in(X,y) -> ST_y(univ))
    & exists y_i (R_in(X,y_i) & ST_y_i(inst_i)) ...)``; bottom and top become
    ``x != x`` and ``x = x``.
    """
    if x.sort is not fo.Sort.WORLD:
        raise fo.SortError("the translation point must be a world variable")
    return _st(phi, x, fresh or fo.Fresh())


def _st(phi: Formula, x: fo.Var, fresh: fo.Fresh) -> fo.FOFormula:
    if isinstance(phi, Prop):
        return fo.Pred(phi.name, x)
    if isinstance(phi, Bot):
        return fo.Not(fo.Eq(x, x))
    if isinstance(phi, Top):
        return fo.Eq(x, x)
    if isinstance(phi, Not):
        return fo.Not(_st(phi.arg, x, fresh))
    if isinstance(phi, And):
        return fo.And((_st(phi.left, x, fresh), _st(phi.right, x, fresh)))
    if isinstance(phi, Or):
        return fo.Or((_st(phi.left, x, fresh), _st(phi.right, x, fresh)))
    if isinstance(phi, Implies):
        return fo.Or((fo.Not(_st(phi.left, x, fresh)), _st(phi.right, x, fresh)))
    if isinstance(phi, Iff):
        return _st(And(Implies(phi.left, phi.right), Implies(phi.right, phi.left)), x, fresh)
    if isinstance(phi, Box):
        X = fresh.subset()
        y = fresh.world()
        parts: list[fo.FOFormula] = [
            fo.RelN(x, X),
            fo.Forall(y, fo.Implies(fo.RelNi(X, y), _st(phi.univ, y, fresh))),
        ]
        for a in phi.inst:
            yi = fresh.world()
            parts.append(fo.Exists(yi, fo.And((fo.RelNi(X, yi), _st(a, yi, fresh)))))
        return fo.Exists(X, fo.And(tuple(parts)))
    raise TypeError(f"not an INL formula: {phi!r}")
