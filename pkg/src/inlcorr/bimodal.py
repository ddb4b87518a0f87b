"""Two-sorted normal bimodal language and the reduction of INL to it.

World-sort formulas talk about points of ``W``; subset-sort formulas about
points of the full powerset ``P(W)``.  ``DiaN``/``BoxN`` step from a world to
its neighbourhoods, ``DiaNi``/``BoxNi`` from a subset to its members.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from inlcorr import fo
from inlcorr import formula as inl
from inlcorr.semantics import NeighbourhoodFrame


class SortMismatch(ValueError):
    pass


class InternalError(RuntimeError):
    """The reduction produced something the classical engine cannot handle."""


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Verum:
    pass


@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "BimodalFormula"


@dataclass(frozen=True)
class Conj:
    left: "BimodalFormula"
    right: "BimodalFormula"


@dataclass(frozen=True)
class Disj:
    left: "BimodalFormula"
    right: "BimodalFormula"


@dataclass(frozen=True)
class Impl:
    left: "BimodalFormula"
    right: "BimodalFormula"


@dataclass(frozen=True)
class DiaN:
    arg: "BimodalFormula"


@dataclass(frozen=True)
class BoxN:
    arg: "BimodalFormula"


@dataclass(frozen=True)
class DiaNi:
    arg: "BimodalFormula"


@dataclass(frozen=True)
class BoxNi:
    arg: "BimodalFormula"


BimodalFormula = Union[Atom, Verum, Falsum, Neg, Conj, Disj, Impl, DiaN, BoxN, DiaNi, BoxNi]

WORLD, SUBSET = fo.Sort.WORLD, fo.Sort.SUBSET


def sort_of(chi: BimodalFormula) -> fo.Sort:
    """Sort of ``chi``; raises :class:`SortMismatch` on an ill-sorted formula."""
    if isinstance(chi, (Atom, Verum, Falsum)):
        return WORLD
    if isinstance(chi, Neg):
        return sort_of(chi.arg)
    if isinstance(chi, (Conj, Disj, Impl)):
        a, b = sort_of(chi.left), sort_of(chi.right)
        if a is not b:
            raise SortMismatch(f"connective joins {a.value} and {b.value} formulas")
        return a
    if isinstance(chi, (DiaN, BoxN)):
        if sort_of(chi.arg) is not SUBSET:
            raise SortMismatch("neighbourhood modalities take a subset formula")
        return WORLD
    if isinstance(chi, (DiaNi, BoxNi)):
        if sort_of(chi.arg) is not WORLD:
            raise SortMismatch("membership modalities take a world formula")
        return SUBSET
    raise TypeError(f"not a bimodal formula: {chi!r}")


def b_children(chi: BimodalFormula) -> tuple[BimodalFormula, ...]:
    if isinstance(chi, (Neg, DiaN, BoxN, DiaNi, BoxNi)):
        return (chi.arg,)
    if isinstance(chi, (Conj, Disj, Impl)):
        return (chi.left, chi.right)
    return ()


def b_atoms(chi: BimodalFormula) -> set[str]:
    if isinstance(chi, Atom):
        return {chi.name}
    out: set[str] = set()
    for c in b_children(chi):
        out |= b_atoms(c)
    return out


# -- translation ------------------------------------------------------------------

def tau(phi: inl.Formula) -> BimodalFormula:
    if isinstance(phi, inl.Prop):
        return Atom(phi.name)
    if isinstance(phi, inl.Top):
        return Verum()
    if isinstance(phi, inl.Bot):
        return Falsum()
    if isinstance(phi, inl.Not):
        return Neg(tau(phi.arg))
    if isinstance(phi, inl.And):
        return Conj(tau(phi.left), tau(phi.right))
    if isinstance(phi, inl.Or):
        return Disj(tau(phi.left), tau(phi.right))
    if isinstance(phi, inl.Implies):
        return Impl(tau(phi.left), tau(phi.right))
    if isinstance(phi, inl.Iff):
        a, b = tau(phi.left), tau(phi.right)
        return Conj(Impl(a, b), Impl(b, a))
    if isinstance(phi, inl.Box):
        parts = [DiaNi(tau(a)) for a in phi.inst] + [BoxNi(tau(phi.univ))]
        body = parts[0]
        for p in parts[1:]:
            body = Conj(body, p)
        return DiaN(body)
    raise TypeError(f"not an INL formula: {phi!r}")


# -- semantics ----------------------------------------------------------------------

def bimodal_satisfies(
    frame: NeighbourhoodFrame,
    valuation: Mapping[str, frozenset],
    point,
    chi: BimodalFormula,
) -> bool:
    """Truth of ``chi`` at a world (an int) or a subset (a set of worlds)."""
    s = sort_of(chi)
    if s is WORLD:
        if isinstance(point, (set, frozenset)):
            raise SortMismatch("world formula evaluated at a subset")
        frame.check_world(point)
        pt = point
    else:
        if not isinstance(point, (set, frozenset)):
            raise SortMismatch("subset formula evaluated at a world")
        if any(not (isinstance(w, int) and 0 <= w < frame.size) for w in point):
            raise SortMismatch(f"{set(point)} is not a subset of the worlds")
        pt = frozenset(point)
    val = {p: frozenset(ws) for p, ws in valuation.items()}
    return _bsat(frame, val, pt, chi)


def _bsat(frame: NeighbourhoodFrame, val, pt, chi) -> bool:
    if isinstance(chi, Atom):
        return pt in val.get(chi.name, frozenset())
    if isinstance(chi, Verum):
        return True
    if isinstance(chi, Falsum):
        return False
    if isinstance(chi, Neg):
        return not _bsat(frame, val, pt, chi.arg)
    if isinstance(chi, Conj):
        return _bsat(frame, val, pt, chi.left) and _bsat(frame, val, pt, chi.right)
    if isinstance(chi, Disj):
        return _bsat(frame, val, pt, chi.left) or _bsat(frame, val, pt, chi.right)
    if isinstance(chi, Impl):
        return not _bsat(frame, val, pt, chi.left) or _bsat(frame, val, pt, chi.right)
    if isinstance(chi, DiaN):
        return any(_bsat(frame, val, S, chi.arg) for S in frame.neighbourhoods[pt])
    if isinstance(chi, BoxN):
        return all(_bsat(frame, val, S, chi.arg) for S in frame.neighbourhoods[pt])
    if isinstance(chi, DiaNi):
        return any(_bsat(frame, val, w, chi.arg) for w in pt)
    if isinstance(chi, BoxNi):
        return all(_bsat(frame, val, w, chi.arg) for w in pt)
    raise TypeError(f"not a bimodal formula: {chi!r}")


def extension_batch(frame: NeighbourhoodFrame, chi: BimodalFormula, batch: Mapping[str, np.ndarray]) -> np.ndarray:
    """Truth sets for a batch of valuations.

    Shape ``(B, n)`` for world formulas and ``(B, 2**n)`` for subset
    formulas, subsets indexed by bitmask over the full powerset.
    """
    n = frame.size
    B = max((a.shape[0] for a in batch.values()), default=1)
    member = frame.membership_matrix().astype(np.int32)  # (2^n, n)
    nmat = frame.neighbourhood_matrix().astype(np.int32)  # (n, 2^n)

    def ext(c: BimodalFormula) -> np.ndarray:
        if isinstance(c, Atom):
            a = batch.get(c.name)
            return np.zeros((B, n), dtype=bool) if a is None else np.broadcast_to(a, (B, n))
        if isinstance(c, Verum):
            return np.ones((B, n), dtype=bool)
        if isinstance(c, Falsum):
            return np.zeros((B, n), dtype=bool)
        if isinstance(c, Neg):
            return ~ext(c.arg)
        if isinstance(c, Conj):
            return ext(c.left) & ext(c.right)
        if isinstance(c, Disj):
            return ext(c.left) | ext(c.right)
        if isinstance(c, Impl):
            return ~ext(c.left) | ext(c.right)
        if isinstance(c, DiaN):
            return ext(c.arg).astype(np.int32) @ nmat.T > 0
        if isinstance(c, BoxN):
            return (~ext(c.arg)).astype(np.int32) @ nmat.T == 0
        if isinstance(c, DiaNi):
            return ext(c.arg).astype(np.int32) @ member.T > 0
        if isinstance(c, BoxNi):
            return (~ext(c.arg)).astype(np.int32) @ member.T == 0
        raise TypeError(f"not a bimodal formula: {c!r}")

    sort_of(chi)
    return ext(chi)


# -- syntactic classes ------------------------------------------------------------------

def nnf(chi: BimodalFormula, negate: bool = False) -> BimodalFormula:
    """Negation normal form: ``Neg`` only directly above atoms."""
    if isinstance(chi, Atom):
        return Neg(chi) if negate else chi
    if isinstance(chi, Verum):
        return Falsum() if negate else chi
    if isinstance(chi, Falsum):
        return Verum() if negate else chi
    if isinstance(chi, Neg):
        return nnf(chi.arg, not negate)
    if isinstance(chi, Conj):
        op = Disj if negate else Conj
        return op(nnf(chi.left, negate), nnf(chi.right, negate))
    if isinstance(chi, Disj):
        op = Conj if negate else Disj
        return op(nnf(chi.left, negate), nnf(chi.right, negate))
    if isinstance(chi, Impl):
        if negate:
            return Conj(nnf(chi.left), nnf(chi.right, True))
        return Disj(nnf(chi.left, True), nnf(chi.right))
    dual = {DiaN: BoxN, BoxN: DiaN, DiaNi: BoxNi, BoxNi: DiaNi}
    if type(chi) in dual:
        op = dual[type(chi)] if negate else type(chi)
        return op(nnf(chi.arg, negate))
    raise TypeError(f"not a bimodal formula: {chi!r}")


def _parities(chi: BimodalFormula, odd: bool, out: set[tuple[str, bool]]) -> None:
    if isinstance(chi, Atom):
        out.add((chi.name, odd))
    elif isinstance(chi, Neg):
        _parities(chi.arg, not odd, out)
    elif isinstance(chi, Impl):
        _parities(chi.left, not odd, out)
        _parities(chi.right, odd, out)
    else:
        for c in b_children(chi):
            _parities(c, odd, out)


def b_is_positive(chi: BimodalFormula) -> bool:
    occ: set[tuple[str, bool]] = set()
    _parities(chi, False, occ)
    return not any(odd for _, odd in occ)


def b_is_negative(chi: BimodalFormula) -> bool:
    occ: set[tuple[str, bool]] = set()
    _parities(chi, False, occ)
    return all(odd for _, odd in occ)


def b_is_pure(chi: BimodalFormula) -> bool:
    return not b_atoms(chi)


def _disjuncts(chi: BimodalFormula) -> list[BimodalFormula]:
    if isinstance(chi, Disj):
        return _disjuncts(chi.left) + _disjuncts(chi.right)
    return [chi]


def _split_guarded(body: BimodalFormula) -> tuple[BimodalFormula, list[BimodalFormula]] | None:
    """``body`` as one boxed atom or'ed with pure side formulas."""
    ds = _disjuncts(body)
    impure = [d for d in ds if not b_is_pure(d)]
    if len(impure) > 1:
        return None
    if not impure:
        return ds[0], ds[1:]
    core = impure[0]
    return core, [d for d in ds if d is not core]


def is_boxed_atom(chi: BimodalFormula) -> bool:
    """Boxed atoms in negation normal form.

    Boxes may nest over conjunctions of boxed atoms, and a box body may carry
    extra pure disjuncts (``BoxN(BoxNi p | pure)``): both stay within reach of
    minimal valuation because the extra material is predicate free.
    """
    if isinstance(chi, (Atom, Verum, Falsum)):
        return True
    if isinstance(chi, Conj):
        return is_boxed_atom(chi.left) and is_boxed_atom(chi.right)
    if isinstance(chi, (BoxN, BoxNi)):
        split = _split_guarded(chi.arg)
        return split is not None and is_boxed_atom(split[0])
    return False


def is_bimodal_antecedent(chi: BimodalFormula) -> bool:
    """Sahlqvist antecedent shape of a formula already in negation normal form."""
    if is_boxed_atom(chi) or b_is_negative(chi):
        return True
    if isinstance(chi, (Conj, Disj)):
        return is_bimodal_antecedent(chi.left) and is_bimodal_antecedent(chi.right)
    if isinstance(chi, (DiaN, DiaNi)):
        return is_bimodal_antecedent(chi.arg)
    return False


def is_bimodal_sahlqvist(chi: BimodalFormula) -> bool:
    """World-sort implication with a Sahlqvist antecedent and a positive consequent."""
    if not isinstance(chi, Impl):
        return False
    try:
        if sort_of(chi) is not WORLD:
            return False
    except SortMismatch:
        return False
    return b_is_positive(chi.right) and is_bimodal_antecedent(nnf(chi.left))


# -- classical correspondence on the bimodal side ---------------------------------------------

def bst(chi: BimodalFormula, t: fo.Var, fresh: fo.Fresh | None = None) -> fo.FOFormula:
    """Sorted standard translation at ``t`` (a world or subset variable)."""
    fresh = fresh or fo.Fresh()
    s = sort_of(chi)
    if t.sort is not s:
        raise SortMismatch(f"{s.value} formula translated at a {t.sort.value} variable")
    return _bst(chi, t, fresh)


def _bst(chi: BimodalFormula, t: fo.Var, fresh: fo.Fresh) -> fo.FOFormula:
    if isinstance(chi, Atom):
        return fo.Pred(chi.name, t)
    if isinstance(chi, Verum):
        return fo.TRUE
    if isinstance(chi, Falsum):
        return fo.FALSE
    if isinstance(chi, Neg):
        return fo.Not(_bst(chi.arg, t, fresh))
    if isinstance(chi, Conj):
        return fo.And((_bst(chi.left, t, fresh), _bst(chi.right, t, fresh)))
    if isinstance(chi, Disj):
        return fo.Or((_bst(chi.left, t, fresh), _bst(chi.right, t, fresh)))
    if isinstance(chi, Impl):
        return fo.Implies(_bst(chi.left, t, fresh), _bst(chi.right, t, fresh))
    if isinstance(chi, (DiaN, BoxN)):
        X = fresh.subset()
        step, body = fo.RelN(t, X), _bst(chi.arg, X, fresh)
    elif isinstance(chi, (DiaNi, BoxNi)):
        y = fresh.world()
        step, body = fo.RelNi(t, y), _bst(chi.arg, y, fresh)
    else:
        raise TypeError(f"not a bimodal formula: {chi!r}")
    v = step.set if isinstance(step, fo.RelN) else step.world
    if isinstance(chi, (DiaN, DiaNi)):
        return fo.Exists(v, fo.And((step, body)))
    return fo.Forall(v, fo.Implies(step, body))


@dataclass(frozen=True)
class _Occ:
    pred: str
    hole: fo.Var
    guard: fo.FOFormula


@dataclass(frozen=True)
class _Branch:
    exists: tuple[fo.Var, ...] = ()
    rel: tuple[fo.FOFormula, ...] = ()
    at: tuple[_Occ, ...] = ()
    neg: tuple[fo.FOFormula, ...] = ()

    def __add__(self, o: "_Branch") -> "_Branch":
        return _Branch(self.exists + o.exists, self.rel + o.rel, self.at + o.at, self.neg + o.neg)


def _step(t: fo.Var, fresh: fo.Fresh) -> tuple[fo.Var, fo.FOFormula]:
    if t.sort is WORLD:
        X = fresh.subset()
        return X, fo.RelN(t, X)
    y = fresh.world()
    return y, fo.RelNi(t, y)


def _boxed(chi: BimodalFormula, t: fo.Var, fresh: fo.Fresh) -> tuple[list[_Occ], list[fo.FOFormula]]:
    if isinstance(chi, Atom):
        h = fresh.hole()
        return [_Occ(chi.name, h, fo.Eq(h, t))], []
    if isinstance(chi, Verum):
        return [], []
    if isinstance(chi, Falsum):
        return [], [fo.FALSE]
    if isinstance(chi, Conj):
        o1, r1 = _boxed(chi.left, t, fresh)
        o2, r2 = _boxed(chi.right, t, fresh)
        return o1 + o2, r1 + r2
    if isinstance(chi, (BoxN, BoxNi)):
        split = _split_guarded(chi.arg)
        if split is None:
            raise InternalError(f"not a boxed atom: {chi!r}")
        core, side = split
        v, step = _step(t, fresh)
        # forall v (step & ~side -> core)
        guard = fo.conj(step, *(fo.Not(_bst(s, v, fresh)) for s in side))
        occs, rels = _boxed(core, v, fresh)
        out = []
        for o in occs:
            if isinstance(o.guard, fo.Eq) and (o.guard.left, o.guard.right) == (o.hole, v):
                out.append(_Occ(o.pred, o.hole, fo.rename_free(guard, {v: o.hole})))
            else:
                out.append(_Occ(o.pred, o.hole, fo.Exists(v, fo.conj(guard, o.guard))))
        return out, [fo.Forall(v, fo.Implies(guard, r)) for r in rels]
    raise InternalError(f"not a boxed atom: {chi!r}")


def _branches(chi: BimodalFormula, t: fo.Var, fresh: fo.Fresh) -> list[_Branch]:
    if is_boxed_atom(chi):
        occs, rels = _boxed(chi, t, fresh)
        return [_Branch(rel=tuple(rels), at=tuple(occs))]
    if b_is_negative(chi):
        return [_Branch(neg=(_bst(chi, t, fresh),))]
    if isinstance(chi, Conj):
        out = []
        for a, b in itertools.product(_branches(chi.left, t, fresh), _branches(chi.right, t, fresh)):
            out.append(a + b)
        return out
    if isinstance(chi, Disj):
        return _branches(chi.left, t, fresh) + _branches(chi.right, t, fresh)
    if isinstance(chi, (DiaN, DiaNi)):
        v, step = _step(t, fresh)
        head = _Branch(exists=(v,), rel=(step,))
        return [head + b for b in _branches(chi.arg, v, fresh)]
    raise InternalError(f"not a Sahlqvist antecedent: {chi!r}")


def sahlqvist_correspondent(chi: BimodalFormula, x: fo.Var | None = None, simplify: bool = True) -> fo.FOFormula:
    """Classical minimal-valuation correspondent of a bimodal Sahlqvist implication."""
    if not is_bimodal_sahlqvist(chi):
        raise InternalError("input is not a bimodal Sahlqvist implication")
    x = x or fo.wvar("x")
    fresh = fo.Fresh()
    branches = _branches(nnf(chi.left), x, fresh)
    pos = _bst(chi.right, x, fresh)
    u = fo.wvar("u")
    conjuncts = []
    for br in branches:
        target = fo.disj(fo.Not(fo.conj(*br.neg)), pos) if br.neg else pos
        for p in sorted(fo.predicates(target)):
            guards = [fo.rename_free(o.guard, {o.hole: u}) for o in br.at if o.pred == p]
            body = fo.disj(*guards) if guards else fo.Not(fo.Eq(u, u))
            target = fo.substitute_predicate(target, p, fo.PredicateDescriptor(u, body))
        conjuncts.append(fo.forall_all(br.exists, fo.Implies(fo.conj(*br.rel), target)))
    alpha = fo.conj(*conjuncts)
    return fo.simplify_fo(alpha) if simplify else alpha


def correspondent_via_bimodal(formula: inl.Formula, x: fo.Var | None = None, simplify: bool = True) -> fo.FOFormula:
    """Correspondent obtained by translating to the bimodal language first."""
    from inlcorr.classifier import classify
    from inlcorr.correspondence import NotSahlqvistError

    cls = classify(formula)
    if not cls.is_sahlqvist:
        raise NotSahlqvistError(cls)
    chi = tau(formula)
    if not is_bimodal_sahlqvist(chi):
        raise InternalError(f"translation of a {cls.verdict.label} formula is not bimodal Sahlqvist")
    return sahlqvist_correspondent(chi, x, simplify)
