import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from conftest import P, VARS, corpus, formulas
from inlcorr import fo
from inlcorr.bimodal import (
    Atom,
    BoxN,
    BoxNi,
    Conj,
    DiaN,
    DiaNi,
    Disj,
    Falsum,
    Impl,
    Neg,
    SortMismatch,
    Verum,
    b_atoms,
    bimodal_satisfies,
    bst,
    correspondent_via_bimodal,
    extension_batch,
    is_bimodal_sahlqvist,
    nnf,
    sort_of,
    tau,
)
from inlcorr.classifier import classify
from inlcorr.correspondence import NotSahlqvistError, correspondent_direct
from inlcorr.formula import Implies, variables
from inlcorr.semantics import (
    NeighbourhoodFrame,
    enumerate_frames,
    random_formula,
    random_frame,
    valuation_batch,
    valuations,
)
from inlcorr import semantics
from inlcorr.verify import correspondence_corpus

x = fo.wvar("x")
p, q, r = Atom("p"), Atom("q"), Atom("r")
SMALL = list(enumerate_frames(1)) + list(enumerate_frames(2))


def frame(*ns):
    return NeighbourhoodFrame(len(ns), tuple(frozenset(frozenset(s) for s in n) for n in ns))


def test_tau_examples():
    assert tau(P("Box(p, q; r)")) == DiaN(Conj(Conj(DiaNi(p), DiaNi(q)), BoxNi(r)))
    assert tau(P("p")) == p
    assert tau(P("Box(; top)")) == DiaN(BoxNi(Verum()))


def test_sorts():
    assert sort_of(DiaNi(p)) is fo.Sort.SUBSET
    with pytest.raises(SortMismatch):
        sort_of(DiaN(p))
    with pytest.raises(SortMismatch):
        sort_of(DiaNi(BoxNi(p)))
    with pytest.raises(SortMismatch):
        sort_of(Conj(p, DiaNi(p)))


def test_bimodal_satisfies_examples():
    assert bimodal_satisfies(frame([set()]), {}, 0, DiaN(BoxNi(Falsum())))
    for chi in (DiaN(BoxNi(Verum())), DiaN(DiaNi(Verum())), DiaN(Neg(DiaNi(p)))):
        assert not bimodal_satisfies(frame([]), {}, 0, chi)
    assert bimodal_satisfies(frame([], []), {"p": {1}}, frozenset({1}), DiaNi(p))


def test_subset_sort_ranges_over_full_powerset():
    # no neighbourhoods anywhere, yet subset formulas are evaluated at every subset
    f = frame([], [])
    ext = extension_batch(f, BoxNi(p), valuation_batch(2, ["p"]))
    assert ext.shape == (4, 4)
    assert ext[:, 0].all()  # the empty set satisfies every box


def test_sort_mismatch_on_evaluation():
    with pytest.raises(SortMismatch):
        bimodal_satisfies(frame([]), {}, frozenset({0}), p)
    with pytest.raises(SortMismatch):
        bimodal_satisfies(frame([]), {}, 0, DiaNi(p))
    with pytest.raises(SortMismatch):
        bimodal_satisfies(frame([]), {}, frozenset({3}), DiaNi(p))


@settings(max_examples=50, deadline=None)
@given(formulas(), hs.integers(0, 10**6))
def test_batch_matches_pointwise(phi, seed):
    f = random_frame(1 + seed % 3, seed)
    chi = tau(phi)
    props = variables(phi)
    ext = np.broadcast_to(extension_batch(f, chi, valuation_batch(f.size, props)), (1 << f.size * len(props), f.size))
    for b, v in enumerate(valuations(f, props)):
        if b % 5 == 0:
            assert list(ext[b]) == [bimodal_satisfies(f, v, w, chi) for w in f.worlds]


def test_tau_correct_on_small_frames():
    phis = corpus(30, seed=4)
    for f in SMALL + [random_frame(3, s) for s in range(20)]:
        for phi in phis:
            batch = valuation_batch(f.size, variables(phi))
            a = semantics.extension_batch(f, phi, batch)
            b = extension_batch(f, tau(phi), batch)
            assert np.array_equal(*np.broadcast_arrays(a, b))


def test_sorted_standard_translation_agrees_with_bimodal_semantics():
    for phi in corpus(25, seed=8) + correspondence_corpus():
        chi = tau(phi)
        alpha = bst(chi, x)
        assert fo.free_vars(alpha) <= {x}
        for f in SMALL[::3]:
            batch = valuation_batch(f.size, variables(phi))
            a = extension_batch(f, chi, batch)
            b = fo.world_table(f, alpha, x, batch)
            assert np.array_equal(*np.broadcast_arrays(a, b))


def test_nnf_preserves_truth():
    for phi in corpus(40, seed=9):
        chi = tau(phi)
        flat = nnf(chi)
        assert b_atoms(flat) == b_atoms(chi)
        for f in SMALL[::17]:
            batch = valuation_batch(f.size, variables(phi))
            assert np.array_equal(*np.broadcast_arrays(extension_batch(f, chi, batch), extension_batch(f, flat, batch)))


def test_is_bimodal_sahlqvist_examples():
    assert is_bimodal_sahlqvist(Impl(DiaN(DiaNi(p)), DiaN(DiaNi(p))))
    assert is_bimodal_sahlqvist(Impl(BoxN(BoxNi(p)), p))
    assert is_bimodal_sahlqvist(Impl(Neg(p), DiaN(DiaNi(p))))
    assert not is_bimodal_sahlqvist(Impl(p, Neg(p)))
    assert not is_bimodal_sahlqvist(Impl(BoxN(DiaNi(p)), p))
    assert not is_bimodal_sahlqvist(Impl(BoxN(Disj(BoxNi(p), BoxNi(q))), p))
    assert not is_bimodal_sahlqvist(DiaN(DiaNi(p)))
    assert not is_bimodal_sahlqvist(Impl(DiaNi(p), DiaNi(p)))


def test_sahlqvist_preservation():
    rng = random.Random(31)
    checked = 0
    for phi in correspondence_corpus():
        assert is_bimodal_sahlqvist(tau(phi))
    for _ in range(600):
        phi = Implies(random_formula(rng.randint(0, 3), VARS, rng), random_formula(2, VARS, rng))
        if classify(phi).is_sahlqvist:
            checked += 1
            assert is_bimodal_sahlqvist(tau(phi))
    assert checked > 50


def test_routes_agree():
    for phi in correspondence_corpus():
        a, b = correspondent_direct(phi), correspondent_via_bimodal(phi)
        assert not fo.predicates(b) and fo.free_vars(b) <= {x}
        for f in SMALL:
            assert np.array_equal(fo.world_table(f, a, x), fo.world_table(f, b, x)), (phi, f)


def test_bimodal_examples():
    b = correspondent_via_bimodal(P("Box(p; top) -> p"))
    X0, y1 = fo.svar("X0"), fo.wvar("y1")
    direct = fo.Forall(X0, fo.Forall(y1, fo.Implies(fo.And((fo.RelN(x, X0), fo.RelNi(X0, y1))), fo.Eq(x, y1))))
    for f in SMALL:
        assert np.array_equal(fo.world_table(f, b, x), fo.world_table(f, direct, x))
    assert correspondent_via_bimodal(P("bot -> p")) == fo.TRUE


def test_not_sahlqvist_rejected():
    with pytest.raises(NotSahlqvistError):
        correspondent_via_bimodal(P("p -> ~p"))
