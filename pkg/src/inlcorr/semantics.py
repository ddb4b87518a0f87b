"""Finite neighbourhood frames, models and the INL satisfaction relation."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from inlcorr.formula import (
    BOT,
    TOP,
    And,
    Bot,
    Box,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Prop,
    Top,
    variables,
)

Valuation = Mapping[str, frozenset]


class UnknownWorld(ValueError):
    pass


class FrameFormatError(ValueError):
    pass


def subset_of_mask(m: int) -> frozenset[int]:
    return frozenset(i for i in range(m.bit_length()) if m >> i & 1)


def mask_of_subset(s: Iterable[int]) -> int:
    m = 0
    for w in s:
        m |= 1 << w
    return m


@dataclass(frozen=True)
class NeighbourhoodFrame:
    """Worlds ``0..size-1`` and, per world, a set of neighbourhoods."""

    size: int
    neighbourhoods: tuple[frozenset[frozenset[int]], ...]
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("a frame needs at least one world")
        if len(self.neighbourhoods) != self.size:
            raise ValueError("neighbourhood function must be total on worlds")
        nb = tuple(frozenset(frozenset(s) for s in ns) for ns in self.neighbourhoods)
        for ns in nb:
            for s in ns:
                if any(not (isinstance(w, int) and 0 <= w < self.size) for w in s):
                    raise ValueError(f"neighbourhood {set(s)} is not a subset of the worlds")
        object.__setattr__(self, "neighbourhoods", nb)

    @property
    def worlds(self) -> range:
        return range(self.size)

    def N(self, w: int) -> frozenset[frozenset[int]]:
        self.check_world(w)
        return self.neighbourhoods[w]

    def check_world(self, w) -> None:
        if isinstance(w, bool) or not isinstance(w, int) or not 0 <= w < self.size:
            raise UnknownWorld(f"{w!r} is not a world of this frame")

    def neighbourhood_masks(self, w: int) -> frozenset[int]:
        return self._masks[w]

    @cached_property
    def _masks(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(mask_of_subset(s) for s in ns) for ns in self.neighbourhoods)

    def membership_matrix(self) -> np.ndarray:
        """``M[S, w]`` is true iff world ``w`` is in the subset with mask ``S``."""
        return _membership(self.size)

    def neighbourhood_matrix(self) -> np.ndarray:
        """``N[w, S]`` is true iff the subset with mask ``S`` is a neighbourhood of ``w``."""
        return self._nmat

    @cached_property
    def _nmat(self) -> np.ndarray:
        mat = np.zeros((self.size, 1 << self.size), dtype=bool)
        for w, ms in enumerate(self._masks):
            for m in ms:
                mat[w, m] = True
        mat.setflags(write=False)
        return mat

    def codes(self) -> tuple[int, ...]:
        """Per-world bitmask over subset indices; the enumeration key."""
        return tuple(sum(1 << m for m in ms) for ms in self._masks)

    @classmethod
    def from_codes(cls, n: int, codes: Sequence[int]) -> "NeighbourhoodFrame":
        nb = tuple(
            frozenset(subset_of_mask(m) for m in range(1 << n) if c >> m & 1) for c in codes
        )
        return cls(n, nb)

    def world_name(self, w: int) -> str:
        return self.names[w] if self.names else f"w{w}"

    def to_json(self, valuation: Valuation | None = None) -> dict:
        name = self.world_name
        out: dict = {
            "worlds": [name(w) for w in self.worlds],
            "N": {
                name(w): [[name(s) for s in sorted(S)] for S in sorted(ns, key=mask_of_subset)]
                for w, ns in enumerate(self.neighbourhoods)
            },
        }
        if valuation is not None:
            out["V"] = {p: [name(s) for s in sorted(ws)] for p, ws in sorted(valuation.items())}
        return out


@lru_cache(maxsize=None)
def _membership(n: int) -> np.ndarray:
    mat = np.array([[bool(m >> w & 1) for w in range(n)] for m in range(1 << n)], dtype=bool)
    mat.setflags(write=False)
    return mat


def load_frame(data: Mapping) -> tuple[NeighbourhoodFrame, dict[str, frozenset[int]]]:
    """Read the JSON frame/model format; world names map to dense indices."""
    try:
        names = [str(w) for w in data["worlds"]]
        nmap = data["N"]
    except (KeyError, TypeError) as exc:
        raise FrameFormatError(f"frame needs 'worlds' and 'N': {exc}") from None
    if len(set(names)) != len(names) or not names:
        raise FrameFormatError("world names must be distinct and non-empty")
    index = {w: i for i, w in enumerate(names)}

    def idx(w) -> int:
        if str(w) not in index:
            raise FrameFormatError(f"unknown world {w!r}")
        return index[str(w)]

    unknown = set(map(str, nmap)) - set(index)
    if unknown:
        raise FrameFormatError(f"N mentions unknown worlds {sorted(unknown)}")
    nb = tuple(
        frozenset(frozenset(idx(s) for s in S) for S in nmap.get(w, [])) for w in names
    )
    val = {str(p): frozenset(idx(s) for s in ws) for p, ws in data.get("V", {}).items()}
    return NeighbourhoodFrame(len(names), nb, names=tuple(names)), val


def read_frame_file(path: str) -> tuple[NeighbourhoodFrame, dict[str, frozenset[int]]]:
    with open(path) as fh:
        return load_frame(json.load(fh))


@dataclass(frozen=True)
class Model:
    frame: NeighbourhoodFrame
    valuation: Valuation = field(default_factory=dict)

    def __post_init__(self):
        val = {p: frozenset(ws) for p, ws in self.valuation.items()}
        for p, ws in val.items():
            if any(not (isinstance(w, int) and 0 <= w < self.frame.size) for w in ws):
                raise ValueError(f"V({p}) is not a subset of the worlds")
        object.__setattr__(self, "valuation", val)

    def V(self, p: str) -> frozenset[int]:
        # unlisted variables denote the empty set
        return self.valuation.get(p, frozenset())


def satisfies(model: Model, w: int, phi: Formula) -> bool:
    """Pointwise satisfaction, clause by clause."""
    model.frame.check_world(w)
    return _sat(model, w, phi)


def _sat(m: Model, w: int, phi: Formula) -> bool:
    if isinstance(phi, Prop):
        return w in m.V(phi.name)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not _sat(m, w, phi.arg)
    if isinstance(phi, And):
        return _sat(m, w, phi.left) and _sat(m, w, phi.right)
    if isinstance(phi, Or):
        return _sat(m, w, phi.left) or _sat(m, w, phi.right)
    if isinstance(phi, Implies):
        return not _sat(m, w, phi.left) or _sat(m, w, phi.right)
    if isinstance(phi, Iff):
        return _sat(m, w, phi.left) == _sat(m, w, phi.right)
    if isinstance(phi, Box):
        for S in m.frame.neighbourhoods[w]:
            if all(_sat(m, s, phi.univ) for s in S) and all(
                any(_sat(m, s, a) for s in S) for a in phi.inst
            ):
                return True
        return False
    raise TypeError(f"not an INL formula: {phi!r}")


def truth_set(model: Model, phi: Formula) -> frozenset[int]:
    return frozenset(w for w in model.frame.worlds if _sat(model, w, phi))


def valuations(frame: NeighbourhoodFrame, props: Sequence[str]) -> Iterator[dict[str, frozenset[int]]]:
    """All valuations of ``props``, in the order used by :func:`valuation_batch`."""
    n = frame.size
    for b in range(1 << (n * len(props))):
        yield {p: subset_of_mask(b >> (j * n) & ((1 << n) - 1)) for j, p in enumerate(props)}


def valuation_batch(n: int, props: Sequence[str]) -> dict[str, np.ndarray]:
    """Every valuation of ``props`` as boolean arrays of shape ``(B, n)``.

    Batch index ``b`` assigns world ``w`` to ``props[j]`` iff bit ``j*n + w``
    of ``b`` is set.
    """
    B = 1 << (n * len(props))
    b = np.arange(B, dtype=np.int64)[:, None]
    out = {}
    for j, p in enumerate(props):
        shifts = np.arange(n, dtype=np.int64)[None, :] + j * n
        out[p] = ((b >> shifts) & 1).astype(bool)
    return out


def extension_batch(frame: NeighbourhoodFrame, phi: Formula, batch: Mapping[str, np.ndarray]) -> np.ndarray:
    """Truth sets of ``phi`` for a whole batch of valuations: shape ``(B, n)``."""
    B = max((a.shape[0] for a in batch.values()), default=1)
    member = frame.membership_matrix().astype(np.int32)  # (2^n, n)
    nmat = frame.neighbourhood_matrix().astype(np.int32)  # (n, 2^n)
    n = frame.size
    memo: dict[int, tuple[np.ndarray, Formula]] = {}

    def ext(f: Formula) -> np.ndarray:
        hit = memo.get(id(f))
        if hit is not None and hit[1] is f:
            return hit[0]
        out = _ext(f)
        memo[id(f)] = (out, f)
        return out

    def _ext(f: Formula) -> np.ndarray:
        if isinstance(f, Prop):
            a = batch.get(f.name)
            return np.zeros((B, n), dtype=bool) if a is None else np.broadcast_to(a, (B, n))
        if isinstance(f, Top):
            return np.ones((B, n), dtype=bool)
        if isinstance(f, Bot):
            return np.zeros((B, n), dtype=bool)
        if isinstance(f, Not):
            return ~ext(f.arg)
        if isinstance(f, And):
            return ext(f.left) & ext(f.right)
        if isinstance(f, Or):
            return ext(f.left) | ext(f.right)
        if isinstance(f, Implies):
            return ~ext(f.left) | ext(f.right)
        if isinstance(f, Iff):
            return ext(f.left) == ext(f.right)
        if isinstance(f, Box):
            # ok[b, S]: S lies inside univ and meets every instantial argument
            ok = (~ext(f.univ)).astype(np.int32) @ member.T == 0
            for a in f.inst:
                ok &= ext(a).astype(np.int32) @ member.T > 0
            return ok.astype(np.int32) @ nmat.T > 0
        raise TypeError(f"not an INL formula: {f!r}")

    return ext(phi)


def valid_at(frame: NeighbourhoodFrame, w: int, phi: Formula) -> bool:
    """Truth at ``w`` under every valuation of the variables of ``phi``."""
    frame.check_world(w)
    return bool(valid_worlds(frame, phi)[w])


def valid_worlds(frame: NeighbourhoodFrame, phi: Formula) -> np.ndarray:
    """Boolean vector over worlds: validity at each point."""
    batch = valuation_batch(frame.size, variables(phi))
    return extension_batch(frame, phi, batch).all(axis=0)


def frame_count(n: int) -> int:
    return (1 << (1 << n)) ** n


def enumerate_frames(n: int) -> Iterator[NeighbourhoodFrame]:
    """All frames on ``n`` worlds.

    ``N(w)`` is encoded as a bitmask over subset indices (subset ``S`` has
    index ``sum(2**v for v in S)``); frames come in lexicographic order of
    ``(code(N(0)), ..., code(N(n-1)))``, so the first frame has every
    ``N(w)`` empty.
    """
    if n < 1:
        raise ValueError("n must be positive")
    for codes in itertools.product(range(1 << (1 << n)), repeat=n):
        yield NeighbourhoodFrame.from_codes(n, codes)


def random_frame(n: int, seed: int | random.Random) -> NeighbourhoodFrame:
    """Each subset is a neighbourhood of each world with probability 1/2."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return NeighbourhoodFrame.from_codes(n, [rng.getrandbits(1 << n) for _ in range(n)])


_PRODUCTIONS = ("var", "top", "bot", "not", "and", "or", "implies", "iff", "box")


def random_formula(
    depth: int, vars: Sequence[str], seed: int | random.Random, max_arity: int = 3
) -> Formula:
    """Random formula of depth at most ``depth``.

    Each node picks a production uniformly (atoms only at depth 0) and a box
    arity uniformly from ``0..max_arity``.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return _random(depth, list(vars), rng, max_arity)


def _random(depth: int, vs: list[str], rng: random.Random, k: int) -> Formula:
    prods = _PRODUCTIONS if depth > 0 else _PRODUCTIONS[:3]
    if not vs:
        prods = tuple(p for p in prods if p != "var")
    kind = rng.choice(prods)
    if kind == "var":
        return Prop(rng.choice(vs))
    if kind == "top":
        return TOP
    if kind == "bot":
        return BOT
    sub = lambda: _random(depth - 1, vs, rng, k)  # noqa: E731
    if kind == "not":
        return Not(sub())
    if kind == "box":
        inst = tuple(sub() for _ in range(rng.randint(0, k)))
        return Box(inst, sub())
    left, right = sub(), sub()
    return {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind](left, right)
