"""Two-sorted first-order formulas over worlds and subsets of worlds.

World variables range over ``W``; subset variables over the full powerset
``P(W)``.  ``RelNi(X, x)`` holds iff ``x`` is in ``X``; ``RelN(x, X)`` holds iff
``X`` is a neighbourhood of ``x``.  Unary predicates are named after the
propositional variables they interpret.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

from inlcorr.semantics import NeighbourhoodFrame


class Sort(enum.Enum):
    WORLD = "world"
    SUBSET = "subset"


class SortError(ValueError):
    pass


class UnsortedVariable(ValueError):
    pass


class MissingAssignment(KeyError):
    pass


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort = Sort.WORLD

    def __lt__(self, other: "Var") -> bool:  # sort by name, then world before subset
        return (self.name, self.sort.value) < (other.name, other.sort.value)


def wvar(name: str) -> Var:
    return Var(name, Sort.WORLD)


def svar(name: str) -> Var:
    return Var(name, Sort.SUBSET)


def _need(v: Var, sort: Sort, where: str) -> None:
    if not isinstance(v, Var) or v.sort is not sort:
        raise SortError(f"{where} expects a {sort.value} variable, got {v!r}")


@dataclass(frozen=True)
class Pred:
    name: str
    arg: Var

    def __post_init__(self):
        _need(self.arg, Sort.WORLD, "Pred")


@dataclass(frozen=True)
class RelNi:
    set: Var
    world: Var

    def __post_init__(self):
        _need(self.set, Sort.SUBSET, "RelNi")
        _need(self.world, Sort.WORLD, "RelNi")


@dataclass(frozen=True)
class RelN:
    world: Var
    set: Var

    def __post_init__(self):
        _need(self.world, Sort.WORLD, "RelN")
        _need(self.set, Sort.SUBSET, "RelN")


@dataclass(frozen=True)
class Eq:
    left: Var
    right: Var

    def __post_init__(self):
        _need(self.left, Sort.WORLD, "Eq")
        _need(self.right, Sort.WORLD, "Eq")


@dataclass(frozen=True)
class Verum:
    pass


@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class Not:
    arg: "FOFormula"


@dataclass(frozen=True)
class And:
    args: tuple["FOFormula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["FOFormula", ...]


@dataclass(frozen=True)
class Implies:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "FOFormula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "FOFormula"


FOFormula = Union[Pred, RelNi, RelN, Eq, Verum, Falsum, Not, And, Or, Implies, Forall, Exists]

TRUE = Verum()
FALSE = Falsum()


def conj(*args: FOFormula) -> FOFormula:
    """Flat conjunction without simplification; one argument is returned as is."""
    flat: list[FOFormula] = []
    for a in args:
        flat.extend(a.args if isinstance(a, And) else (a,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*args: FOFormula) -> FOFormula:
    flat: list[FOFormula] = []
    for a in args:
        flat.extend(a.args if isinstance(a, Or) else (a,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def exists_all(vs: Iterable[Var], body: FOFormula) -> FOFormula:
    for v in reversed(list(vs)):
        body = Exists(v, body)
    return body


def forall_all(vs: Iterable[Var], body: FOFormula) -> FOFormula:
    for v in reversed(list(vs)):
        body = Forall(v, body)
    return body


@dataclass(frozen=True)
class PredicateDescriptor:
    """``lambda hole. body``: a definable set of worlds."""

    hole: Var
    body: FOFormula

    def __post_init__(self):
        _need(self.hole, Sort.WORLD, "PredicateDescriptor")

    def params(self) -> frozenset[Var]:
        return free_vars(self.body) - {self.hole}

    def apply(self, t: Var) -> FOFormula:
        return rename_free(self.body, {self.hole: t})


class Fresh:
    """Monotone counter handing out ``y<k>`` / ``X<k>`` / ``u<k>`` names."""

    def __init__(self, start: int = 0):
        self.n = start

    def _next(self) -> int:
        k = self.n
        self.n += 1
        return k

    def world(self, prefix: str = "y") -> Var:
        return Var(f"{prefix}{self._next()}", Sort.WORLD)

    def subset(self, prefix: str = "X") -> Var:
        return Var(f"{prefix}{self._next()}", Sort.SUBSET)

    def hole(self) -> Var:
        return self.world("u")


# -- structure ---------------------------------------------------------------

def fo_children(a: FOFormula) -> tuple[FOFormula, ...]:
    if isinstance(a, Not):
        return (a.arg,)
    if isinstance(a, (And, Or)):
        return a.args
    if isinstance(a, Implies):
        return (a.left, a.right)
    if isinstance(a, (Forall, Exists)):
        return (a.body,)
    return ()


def atom_vars(a: FOFormula) -> tuple[Var, ...]:
    if isinstance(a, Pred):
        return (a.arg,)
    if isinstance(a, RelNi):
        return (a.set, a.world)
    if isinstance(a, RelN):
        return (a.world, a.set)
    if isinstance(a, Eq):
        return (a.left, a.right)
    return ()


def free_vars(a: FOFormula) -> frozenset[Var]:
    if isinstance(a, (Forall, Exists)):
        return free_vars(a.body) - {a.var}
    out = set(atom_vars(a))
    for c in fo_children(a):
        out |= free_vars(c)
    return frozenset(out)


def all_vars(a: FOFormula) -> frozenset[Var]:
    out = set(atom_vars(a))
    if isinstance(a, (Forall, Exists)):
        out.add(a.var)
    for c in fo_children(a):
        out |= all_vars(c)
    return frozenset(out)


def predicates(a: FOFormula) -> frozenset[str]:
    if isinstance(a, Pred):
        return frozenset({a.name})
    out: frozenset[str] = frozenset()
    for c in fo_children(a):
        out |= predicates(c)
    return out


def is_well_sorted(a: FOFormula) -> bool:
    """Bound variables keep one sort per name inside their scope."""
    try:
        _check_sorts(a, {})
    except SortError:
        return False
    return True


def _check_sorts(a: FOFormula, scope: dict[str, Sort]) -> None:
    for v in atom_vars(a):
        if scope.get(v.name, v.sort) is not v.sort:
            raise SortError(v.name)
    if isinstance(a, (Forall, Exists)):
        _check_sorts(a.body, {**scope, a.var.name: a.var.sort})
        return
    for c in fo_children(a):
        _check_sorts(c, scope)


def _prime(v: Var, avoid: set[Var]) -> Var:
    names = {u.name for u in avoid}
    name = v.name + "'"
    while name in names:
        name += "'"
    return Var(name, v.sort)


def _rebuild(a: FOFormula, kids: list[FOFormula]) -> FOFormula:
    if isinstance(a, Not):
        return Not(kids[0])
    if isinstance(a, And):
        return And(tuple(kids))
    if isinstance(a, Or):
        return Or(tuple(kids))
    if isinstance(a, Implies):
        return Implies(kids[0], kids[1])
    raise TypeError(a)


def rename_free(a: FOFormula, mapping: Mapping[Var, Var]) -> FOFormula:
    """Capture-avoiding renaming of free variables."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return a
    if isinstance(a, Pred):
        return Pred(a.name, mapping.get(a.arg, a.arg))
    if isinstance(a, RelNi):
        return RelNi(mapping.get(a.set, a.set), mapping.get(a.world, a.world))
    if isinstance(a, RelN):
        return RelN(mapping.get(a.world, a.world), mapping.get(a.set, a.set))
    if isinstance(a, Eq):
        return Eq(mapping.get(a.left, a.left), mapping.get(a.right, a.right))
    if isinstance(a, (Verum, Falsum)):
        return a
    if isinstance(a, (Forall, Exists)):
        inner = {k: v for k, v in mapping.items() if k != a.var}
        fv = free_vars(a.body)
        inner = {k: v for k, v in inner.items() if k in fv}
        if not inner:
            return a
        var = a.var
        if var in inner.values():
            var = _prime(var, set(all_vars(a.body)) | set(inner.values()) | set(inner))
            inner[a.var] = var
        return type(a)(var, rename_free(a.body, inner))
    return _rebuild(a, [rename_free(c, mapping) for c in fo_children(a)])


def substitute_predicate(a: FOFormula, name: str, sigma: PredicateDescriptor) -> FOFormula:
    """Replace every ``name(t)`` by ``sigma`` applied to ``t``, avoiding capture."""
    params = sigma.params()
    if isinstance(a, Pred):
        return sigma.apply(a.arg) if a.name == name else a
    if isinstance(a, (RelNi, RelN, Eq, Verum, Falsum)):
        return a
    if isinstance(a, (Forall, Exists)):
        if name not in predicates(a.body):
            return a
        var, body = a.var, a.body
        if var in params:
            var = _prime(var, set(all_vars(body)) | params | set(all_vars(sigma.body)))
            body = rename_free(body, {a.var: var})
        return type(a)(var, substitute_predicate(body, name, sigma))
    return _rebuild(a, [substitute_predicate(c, name, sigma) for c in fo_children(a)])


# -- simplification ------------------------------------------------------------

def simplify_fo(a: FOFormula) -> FOFormula:
    """Local equivalence-preserving cleanup: constants, units, flattening.

    Also pulls an existential out of a conjunction when its variable does not
    occur free in the other conjuncts.
    """
    if isinstance(a, Eq):
        return TRUE if a.left == a.right else a
    if isinstance(a, (Pred, RelNi, RelN, Verum, Falsum)):
        return a
    if isinstance(a, Not):
        b = simplify_fo(a.arg)
        if isinstance(b, Verum):
            return FALSE
        if isinstance(b, Falsum):
            return TRUE
        if isinstance(b, Not):
            return b.arg
        return Not(b)
    if isinstance(a, And):
        return _simplify_and([simplify_fo(c) for c in a.args])
    if isinstance(a, Or):
        parts: list[FOFormula] = []
        for c in (simplify_fo(c) for c in a.args):
            if isinstance(c, Verum):
                return TRUE
            if isinstance(c, Falsum):
                continue
            for d in c.args if isinstance(c, Or) else (c,):
                if d not in parts:
                    parts.append(d)
        return disj(*parts)
    if isinstance(a, Implies):
        left, right = simplify_fo(a.left), simplify_fo(a.right)
        if isinstance(left, Falsum) or isinstance(right, Verum):
            return TRUE
        if isinstance(left, Verum):
            return right
        if isinstance(right, Falsum):
            return simplify_fo(Not(left))
        if left == right:
            return TRUE
        return Implies(left, right)
    if isinstance(a, (Forall, Exists)):
        body = simplify_fo(a.body)
        # both domains are non-empty, so a vacuous quantifier can go
        if a.var not in free_vars(body):
            return body
        return type(a)(a.var, body)
    raise TypeError(a)


def _simplify_and(items: list[FOFormula]) -> FOFormula:
    parts: list[FOFormula] = []
    for c in items:
        if isinstance(c, Falsum):
            return FALSE
        if isinstance(c, Verum):
            continue
        for d in c.args if isinstance(c, And) else (c,):
            if d not in parts:
                parts.append(d)
    for i, c in enumerate(parts):
        if isinstance(c, Exists) and len(parts) > 1:
            rest = parts[:i] + parts[i + 1:]
            if all(c.var not in free_vars(r) for r in rest):
                return Exists(c.var, _simplify_and(rest[:i] + [c.body] + rest[i:]))
    return conj(*parts)


# -- evaluation ------------------------------------------------------------------

Value = Union[int, frozenset]


def _mask(value, n: int) -> int:
    if isinstance(value, (set, frozenset)):
        m = 0
        for w in value:
            if not (isinstance(w, int) and 0 <= w < n):
                raise UnsortedVariable(f"subset element {w!r} is not a world")
            m |= 1 << w
        return m
    raise UnsortedVariable(f"subset variable bound to non-set {value!r}")


def eval_fo(
    frame: NeighbourhoodFrame,
    predicates: Mapping[str, Iterable[int]],
    assignment: Mapping[Var, Value],
    alpha: FOFormula,
) -> bool:
    """Tarskian evaluation over the two-sorted frame induced by ``frame``.

    ``assignment`` maps world variables to world indices and subset
    variables to sets of worlds.
    """
    n = frame.size
    env: dict[Var, int] = {}
    for v, val in assignment.items():
        if v.sort is Sort.WORLD:
            if isinstance(val, bool) or not isinstance(val, int) or not 0 <= val < n:
                raise UnsortedVariable(f"{v.name} needs a world in 0..{n - 1}, got {val!r}")
            env[v] = val
        else:
            env[v] = _mask(val, n)
    preds = {p: _mask(frozenset(ws), n) for p, ws in predicates.items()}
    nbhd = [frame.neighbourhood_masks(w) for w in range(n)]
    return _ev(alpha, env, preds, nbhd, n)


def _look(env: dict[Var, int], v: Var) -> int:
    try:
        return env[v]
    except KeyError:
        raise MissingAssignment(v.name) from None


def _ev(a, env, preds, nbhd, n) -> bool:
    if isinstance(a, Pred):
        if a.name not in preds:
            raise MissingAssignment(f"predicate {a.name}")
        return bool(preds[a.name] >> _look(env, a.arg) & 1)
    if isinstance(a, RelNi):
        return bool(_look(env, a.set) >> _look(env, a.world) & 1)
    if isinstance(a, RelN):
        return _look(env, a.set) in nbhd[_look(env, a.world)]
    if isinstance(a, Eq):
        return _look(env, a.left) == _look(env, a.right)
    if isinstance(a, Verum):
        return True
    if isinstance(a, Falsum):
        return False
    if isinstance(a, Not):
        return not _ev(a.arg, env, preds, nbhd, n)
    if isinstance(a, And):
        return all(_ev(c, env, preds, nbhd, n) for c in a.args)
    if isinstance(a, Or):
        return any(_ev(c, env, preds, nbhd, n) for c in a.args)
    if isinstance(a, Implies):
        return not _ev(a.left, env, preds, nbhd, n) or _ev(a.right, env, preds, nbhd, n)
    if isinstance(a, (Forall, Exists)):
        dom = range(n) if a.var.sort is Sort.WORLD else range(1 << n)
        test = all if isinstance(a, Forall) else any
        return test(_ev(a.body, {**env, a.var: d}, preds, nbhd, n) for d in dom)
    raise TypeError(a)


class FOTable:
    """Batched evaluator: truth tables over free variables and a valuation axis.

    The result of :meth:`table` is a boolean array of shape
    ``(B, d_1, ..., d_k)`` where ``B`` is the valuation batch (size 1 for
    predicate-free formulas) and ``d_i`` ranges over the i-th free variable
    in sorted order (``n`` for worlds, ``2**n`` for subsets).
    """

    def __init__(self, frame: NeighbourhoodFrame, preds: Mapping[str, np.ndarray] | None = None):
        self.frame = frame
        self.n = frame.size
        self.preds = dict(preds or {})
        self.member = frame.membership_matrix()  # (2^n, n)
        self.nbhd = frame.neighbourhood_matrix()  # (n, 2^n)
        self._memo: dict[int, tuple[np.ndarray, tuple[Var, ...]]] = {}

    def _dim(self, v: Var) -> int:
        return self.n if v.sort is Sort.WORLD else 1 << self.n

    @staticmethod
    def _lift(arr: np.ndarray, have: tuple[Var, ...], want: tuple[Var, ...]) -> np.ndarray:
        # both tuples are sorted, so only singleton axes need inserting
        shape = [arr.shape[0]]
        it = iter(arr.shape[1:])
        for v in want:
            shape.append(next(it) if v in have else 1)
        return arr.reshape(shape)

    def table(self, a: FOFormula) -> tuple[np.ndarray, tuple[Var, ...]]:
        key = id(a)
        hit = self._memo.get(key)
        if hit is not None and hit[2] is a:
            return hit[0], hit[1]
        arr, vs = self._table(a)
        self._memo[key] = (arr, vs, a)
        return arr, vs

    def _atom(self, mat: np.ndarray, v1: Var, v2: Var):
        if v1 == v2:
            return np.diagonal(mat)[None, :].copy(), (v1,)
        if v2 < v1:
            return mat.T[None, :, :], (v2, v1)
        return mat[None, :, :], (v1, v2)

    def _table(self, a: FOFormula):
        if isinstance(a, Pred):
            if a.name not in self.preds:
                raise MissingAssignment(f"predicate {a.name}")
            return self.preds[a.name], (a.arg,)
        if isinstance(a, RelNi):
            return self._atom(self.member, a.set, a.world)
        if isinstance(a, RelN):
            return self._atom(self.nbhd, a.world, a.set)
        if isinstance(a, Eq):
            return self._atom(np.eye(self.n, dtype=bool), a.left, a.right)
        if isinstance(a, Verum):
            return np.ones((1,), dtype=bool), ()
        if isinstance(a, Falsum):
            return np.zeros((1,), dtype=bool), ()
        if isinstance(a, Not):
            arr, vs = self.table(a.arg)
            return ~arr, vs
        if isinstance(a, (And, Or, Implies)):
            kids = [self.table(c) for c in fo_children(a)]
            want = tuple(sorted(set().union(*(vs for _, vs in kids))))
            lifted = [self._lift(arr, vs, want) for arr, vs in kids]
            if not lifted:
                return np.full((1,), isinstance(a, And)), ()
            if isinstance(a, Implies):
                out = ~lifted[0] | lifted[1]
            elif isinstance(a, And):
                out = np.logical_and.reduce(np.broadcast_arrays(*lifted)) if len(lifted) > 1 else lifted[0]
            else:
                out = np.logical_or.reduce(np.broadcast_arrays(*lifted)) if len(lifted) > 1 else lifted[0]
            return out, want
        if isinstance(a, (Forall, Exists)):
            arr, vs = self.table(a.body)
            if a.var not in vs:
                return arr, vs
            axis = 1 + vs.index(a.var)
            arr = np.broadcast_to(arr, arr.shape[:axis] + (self._dim(a.var),) + arr.shape[axis + 1:])
            red = arr.all(axis=axis) if isinstance(a, Forall) else arr.any(axis=axis)
            return red, tuple(v for v in vs if v != a.var)
        raise TypeError(a)

    def over(self, a: FOFormula, order: tuple[Var, ...]) -> np.ndarray:
        """Full table of ``a`` with axes ``(B, *order)``; ``order`` must cover its free variables."""
        arr, vs = self.table(a)
        missing = set(vs) - set(order)
        if missing:
            raise MissingAssignment(", ".join(sorted(v.name for v in missing)))
        want = tuple(sorted(order))
        arr = self._lift(arr, vs, want)
        shape = (arr.shape[0],) + tuple(self._dim(v) for v in want)
        arr = np.broadcast_to(arr, shape)
        return np.transpose(arr, [0] + [1 + want.index(v) for v in order])


def world_table(
    frame: NeighbourhoodFrame,
    alpha: FOFormula,
    x: Var,
    preds: Mapping[str, np.ndarray] | None = None,
) -> np.ndarray:
    """Truth of ``alpha`` at each world for ``x``: shape ``(B, n)``."""
    return FOTable(frame, preds).over(alpha, (x,))


def all_subsets(n: int) -> list[frozenset[int]]:
    return [frozenset(w for w in range(n) if m >> w & 1) for m in range(1 << n)]


def assignments(frame: NeighbourhoodFrame, vs: Iterable[Var]):
    """Every sort-correct assignment to ``vs`` (worlds as ints, subsets as frozensets)."""
    vs = list(vs)
    doms = [range(frame.size) if v.sort is Sort.WORLD else all_subsets(frame.size) for v in vs]
    for combo in itertools.product(*doms):
        yield dict(zip(vs, combo))
