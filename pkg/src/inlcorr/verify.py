"""Finite-frame oracle checks for the translation and correspondence claims.

Frames with at most two worlds are enumerated exhaustively; for every size
from three up to ``max_worlds`` a seeded sample of random frames is drawn.
Valuations are always exhaustive over the variables that occur.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from inlcorr import bimodal, fo
from inlcorr.classifier import classify
from inlcorr.correspondence import NotSahlqvistError, correspondent_direct
from inlcorr.formula import Box, Formula, Prop, variables
from inlcorr.parser import parse_inl, print_inl
from inlcorr.semantics import (
    NeighbourhoodFrame,
    enumerate_frames,
    extension_batch,
    random_frame,
    random_formula,
    subset_of_mask,
    valid_worlds,
    valuation_batch,
)
from inlcorr.translation import st

EXHAUSTIVE_LIMIT = 2
X = fo.wvar("x")
ROUTES = ("direct", "bimodal", "both")


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one oracle run.

    ``disagreements`` is only filled by the two-route correspondence check;
    a report passes when both it and ``counterexamples`` are empty.
    """

    property: str
    instances: int
    counterexamples: tuple[dict, ...] = ()
    elapsed: float = 0.0
    seed: int = 0
    disagreements: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.counterexamples and not self.disagreements

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "passed": self.passed,
            "instances": self.instances,
            "counterexamples": list(self.counterexamples),
            "disagreements": list(self.disagreements),
            "elapsed": round(self.elapsed, 3),
            "seed": self.seed,
        }


# -- frame streams ------------------------------------------------------------------------------

def frames(max_worlds: int, samples: int, seed: int) -> Iterator[NeighbourhoodFrame]:
    """Exhaustive frames up to two worlds, then ``samples`` random frames per larger size."""
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    for n in range(1, min(max_worlds, EXHAUSTIVE_LIMIT) + 1):
        yield from enumerate_frames(n)
    for n in range(EXHAUSTIVE_LIMIT + 1, max_worlds + 1):
        rng = random.Random(seed * 1009 + n)
        for _ in range(samples):
            yield random_frame(n, rng)


def _valuation(frame: NeighbourhoodFrame, props: Sequence[str], b: int) -> dict[str, frozenset[int]]:
    n = frame.size
    return {p: subset_of_mask(b >> (j * n) & ((1 << n) - 1)) for j, p in enumerate(props)}


def _mismatches(frame, phi, props, expected: np.ndarray, actual: np.ndarray) -> list[dict]:
    """Counterexample records for every ``(valuation, world)`` where the tables differ."""
    expected, actual = np.broadcast_arrays(expected, actual)
    out = []
    for b, w in zip(*np.nonzero(expected != actual)):
        out.append({
            "frame": frame.to_json(_valuation(frame, props, int(b))),
            "world": frame.world_name(int(w)),
            "formula": print_inl(phi),
            "expected": bool(expected[b, w]),
            "actual": bool(actual[b, w]),
        })
    return out


def _sort_key(c: dict) -> tuple:
    return (c.get("formula", ""), len(c["frame"]["worlds"]), repr(c["frame"]), c["world"])


def _run(name: str, job: Callable, frame_list: list[NeighbourhoodFrame], seed: int, workers: int) -> CheckReport:
    """Apply ``job`` to every frame and merge ``(instances, counterexamples, disagreements)``."""
    start = time.perf_counter()
    if workers > 1 and len(frame_list) > 1:
        chunk = max(1, len(frame_list) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, frame_list, chunksize=chunk))
    else:
        results = [job(f) for f in frame_list]
    count = sum(r[0] for r in results)
    bad = sorted((c for r in results for c in r[1]), key=_sort_key)
    dis = sorted((c for r in results for c in r[2]), key=_sort_key)
    return CheckReport(name, count, tuple(bad), time.perf_counter() - start, seed, tuple(dis))


# -- translations -----------------------------------------------------------------------------

def _st_job(items: tuple[tuple[Formula, fo.FOFormula, tuple[str, ...]], ...], frame: NeighbourhoodFrame):
    count, bad = 0, []
    for phi, alpha, props in items:
        batch = valuation_batch(frame.size, props)
        expected = extension_batch(frame, phi, batch)
        actual = fo.world_table(frame, alpha, X, batch)
        count += expected.size
        bad += _mismatches(frame, phi, props, expected, actual)
    return count, bad, []


def check_st_correctness(
    corpus: Sequence[Formula], max_worlds: int = 3, samples: int = 200, seed: int = 0, workers: int = 1
) -> CheckReport:
    """INL truth against the first-order truth of the standard translation."""
    items = tuple((phi, st(phi, X), tuple(variables(phi))) for phi in corpus)
    return _run("st-correctness", partial(_st_job, items), list(frames(max_worlds, samples, seed)), seed, workers)


def _tau_job(items, frame: NeighbourhoodFrame):
    count, bad = 0, []
    for phi, chi, props in items:
        batch = valuation_batch(frame.size, props)
        expected = extension_batch(frame, phi, batch)
        actual = bimodal.extension_batch(frame, chi, batch)
        count += expected.size
        bad += _mismatches(frame, phi, props, expected, actual)
    return count, bad, []


def check_tau_correctness(
    corpus: Sequence[Formula], max_worlds: int = 3, samples: int = 200, seed: int = 0, workers: int = 1
) -> CheckReport:
    """INL truth against bimodal truth of the translation into the bimodal language."""
    items = tuple((phi, bimodal.tau(phi), tuple(variables(phi))) for phi in corpus)
    return _run("tau-correctness", partial(_tau_job, items), list(frames(max_worlds, samples, seed)), seed, workers)


# -- correspondence ---------------------------------------------------------------------------

def _corr_job(items, frame: NeighbourhoodFrame):
    count, bad, dis = 0, [], []
    for phi, alphas in items:
        valid = valid_worlds(frame, phi)[None, :]
        tables = {route: fo.world_table(frame, a, X)[:1] for route, a in alphas.items()}
        count += frame.size
        for route, t in tables.items():
            for c in _mismatches(frame, phi, (), valid, t):
                bad.append({**c, "route": route})
        if len(tables) == 2:
            for c in _mismatches(frame, phi, (), tables["direct"], tables["bimodal"]):
                dis.append({"frame": c["frame"], "world": c["world"], "formula": c["formula"],
                            "direct": c["expected"], "bimodal": c["actual"]})
    return count, bad, dis


def correspondents(phi: Formula, route: str = "direct") -> dict[str, fo.FOFormula]:
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}")
    out = {}
    if route in ("direct", "both"):
        out["direct"] = correspondent_direct(phi, X)
    if route in ("bimodal", "both"):
        out["bimodal"] = bimodal.correspondent_via_bimodal(phi, X)
    return out


def check_correspondence(
    formula: Formula | Sequence[Formula],
    route: str = "direct",
    max_worlds: int = 3,
    samples: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> CheckReport:
    """Frame validity at each world against the correspondent's truth there.

    ``formula`` may also be a whole corpus.  Every formula must be Sahlqvist.
    """
    corpus = [formula] if not isinstance(formula, (list, tuple)) else list(formula)
    for phi in corpus:
        cls = classify(phi)
        if not cls.is_sahlqvist:
            raise NotSahlqvistError(cls)
    items = tuple((phi, correspondents(phi, route)) for phi in corpus)
    name = f"correspondence-{route}"
    return _run(name, partial(_corr_job, items), list(frames(max_worlds, samples, seed)), seed, workers)


# -- the monotonicity / additivity lemma ---------------------------------------------------------

def lemma_formula(arity: int) -> Formula:
    """``Box(p1, ..., pk; p0)``."""
    return Box(tuple(Prop(f"p{i}") for i in range(1, arity + 1)), Prop("p0"))


def _lemma_job(arities: tuple[int, ...], frame: NeighbourhoodFrame):
    n = frame.size
    count, bad = 0, []
    for k in arities:
        phi = lemma_formula(k)
        props = tuple(f"p{i}" for i in range(k + 1))
        batch = valuation_batch(n, props)
        ext = extension_batch(frame, phi, batch)  # (B, n)
        B = ext.shape[0]
        idx = np.arange(B)
        # item 1: monotone along every covering step V < V + {one point}
        for bit in range(n * len(props)):
            lo = idx[(idx >> bit) & 1 == 0]
            hi = lo | (1 << bit)
            viol = ext[lo] & ~ext[hi]
            count += viol.size
            for b, w in zip(*np.nonzero(viol)):
                bad.append({
                    "item": "monotonicity",
                    "frame": frame.to_json(_valuation(frame, props, int(lo[b]))),
                    "larger": {p: sorted(s) for p, s in _valuation(frame, props, int(hi[b])).items()},
                    "world": frame.world_name(int(w)),
                    "formula": print_inl(phi),
                    "expected": True,
                    "actual": False,
                })
        # item 2: complete additivity in each instantial coordinate
        for i in range(1, k + 1):
            field_mask = ((1 << n) - 1) << (i * n)
            witness = np.zeros_like(ext)
            for v in range(n):
                has_v = ((idx >> (i * n + v)) & 1).astype(bool)
                single = (idx & ~field_mask) | (1 << (i * n + v))
                witness |= has_v[:, None] & ext[single]
            count += ext.size
            for c in _mismatches(frame, phi, props, ext, witness):
                bad.append({"item": f"additivity-p{i}", **c})
    return count, bad, []


def check_lemma_monotonicity(
    max_worlds: int = 3, samples: int = 200, seed: int = 0, arities: Iterable[int] = (0, 1, 2, 3), workers: int = 1
) -> CheckReport:
    """Monotonicity in every coordinate and complete additivity of the box."""
    job = partial(_lemma_job, tuple(arities))
    return _run("lemma-monotonicity-additivity", job, list(frames(max_worlds, samples, seed)), seed, workers)


# -- corpora ------------------------------------------------------------------------------------

EDGE_FORMULAS = (
    "Box(; top)",
    "Box(; bot)",
    "Box(; p)",
    "~Box(; ~p)",
    "Box(; Box(; top))",
    "Box(p; top)",
    "Box(p, q, p; top)",
    "Box(top, bot; q)",
    "~Box(~p; top)",
    "~Box(~~Box(~q; bot); top)",
    "~Box(~~Box(~p; Box(; top)); Box(top; bot))",
    "~Box(~(p & ~Box(~q; top)); bot)",
    "Box(p; ~Box(~q; top))",
    "Box(Box(; bot); Box(top; top))",
    "Box(p, q; p & q) -> p | q",
    "Box(p; q) <-> Box(q; p)",
    "p -> Box(p; top)",
    "Box(; p) -> Box(p; top)",
    "~Box(~p; top) & ~Box(~q; bot)",
    "Box(~p, Box(q; p); p -> q)",
)

CORRESPONDENCE_FORMULAS = (
    # very simple
    "Box(p; top) -> p",
    "p -> Box(p; top)",
    "Box(; p) -> Box(p; top)",
    "Box(p; p) -> Box(; p)",
    "Box(p, q; top) -> Box(q, p; top)",
    "Box(Box(p; top); q) -> Box(q; p)",
    "p & Box(q; bot) -> Box(; p | q)",
    "Box(; p) & Box(; q) -> Box(; p & q)",
    "bot -> p",
    "p -> p",
    # simple
    "~Box(~p; top) -> p",
    "~Box(~~Box(~p; bot); top) -> Box(p; p)",
    "Box(p; p & q) -> Box(q; p)",
    "Box(Box(p; ~Box(~q; bot)); top) -> p | q",
    "~Box(~p; Box(; top)) & q -> Box(p, q; top)",
    "Box(p; ~Box(~(p & q); top)) -> Box(; q)",
    # full
    "p | Box(q; top) -> Box(p, q; top)",
    "Box(p; ~q) -> q",
    "(p & ~q) | Box(q; ~p) -> Box(p; q)",
    "Box(p; ~p) | ~q -> ~Box(~p; top) | q",
    "~p & Box(q; ~p) -> Box(q; top)",
    "Box(p | ~q; ~q) -> Box(; p) | q",
)

NON_SAHLQVIST_FORMULAS = (
    "Box(p; Box(q; top)) -> p",
    "Box(; ~Box(~Box(p; top); top)) -> p",
    "Box(p; top) -> ~p",
)


def edge_corpus() -> list[Formula]:
    return [parse_inl(s) for s in EDGE_FORMULAS]


def random_corpus(size: int = 100, depth: int = 3, vars: Sequence[str] = ("p", "q"), seed: int = 0) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(depth, vars, rng) for _ in range(size)]


def default_corpus(seed: int = 0) -> list[Formula]:
    """100 random formulas of depth at most 3 over ``p, q`` plus the edge formulas."""
    return random_corpus(seed=seed) + edge_corpus()


def correspondence_corpus() -> list[Formula]:
    return [parse_inl(s) for s in CORRESPONDENCE_FORMULAS]
