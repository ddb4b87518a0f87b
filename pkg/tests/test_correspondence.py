import numpy as np
import pytest

from conftest import P
from inlcorr import fo
from inlcorr.classifier import Node, Role, classify
from inlcorr.correspondence import (
    HOLE,
    MalformedDecomposition,
    NotSahlqvistError,
    PointOcc,
    SetOcc,
    antecedent_normal_form,
    correspondent_direct,
)
from inlcorr.correspondence import minimal_valuation
from inlcorr.parser import print_fo, print_inl
from inlcorr.semantics import NeighbourhoodFrame, enumerate_frames, random_frame, valid_worlds
from inlcorr.verify import correspondence_corpus

x = fo.wvar("x")
X0, X1, y1 = fo.svar("X0"), fo.svar("X1"), fo.wvar("y1")
SMALL = list(enumerate_frames(1)) + list(enumerate_frames(2))


def nf_of(text):
    return antecedent_normal_form(classify(P(text + " -> top")).decomposition, x)


def same_on_small_frames(a, b):
    for f in SMALL:
        ta, tb = fo.world_table(f, a, x), fo.world_table(f, b, x)
        if not np.array_equal(*np.broadcast_arrays(ta, tb)):
            return False
    return True


def test_normal_form_of_delta_box():
    (d,) = nf_of("Box(p; top)").disjuncts
    v = fo.wvar("y2")
    assert d.exists == (X0, y1)
    assert d.rel == (fo.RelN(x, X0), fo.RelNi(X0, y1), fo.Forall(v, fo.Implies(fo.RelNi(X0, v), fo.Eq(v, v))))
    assert d.at == (PointOcc("p", y1),) and d.neg == ()


def test_normal_form_atom_and_disjunction():
    (d,) = nf_of("p").disjuncts
    assert d.rel == () and d.at == (PointOcc("p", x),) and d.neg == ()
    assert len(nf_of("p | q").disjuncts) == 2
    assert len(nf_of("(p | q) & (p | ~q)").disjuncts) == 4
    assert nf_of("bot").disjuncts == ()


def test_minimal_valuations():
    nf = nf_of("Box(p; top)")
    assert minimal_valuation(nf, 0, "p") == fo.PredicateDescriptor(HOLE, fo.Eq(HOLE, y1))
    nf = nf_of("Box(; p)")
    sigma = minimal_valuation(nf, 0, "p")
    assert fo.simplify_fo(sigma.body) == fo.RelNi(X0, HOLE)
    assert isinstance(nf.disjuncts[0].at[0], SetOcc)
    assert minimal_valuation(nf, 0, "q") == fo.PredicateDescriptor(HOLE, fo.Not(fo.Eq(HOLE, HOLE)))


def test_worked_example_delta_box_implies_p():
    alpha = correspondent_direct(P("Box(p; top) -> p"))
    expected = fo.Forall(X0, fo.Forall(y1, fo.Implies(fo.And((fo.RelN(x, X0), fo.RelNi(X0, y1))), fo.Eq(x, y1))))
    assert alpha == expected
    assert print_fo(alpha) == "forall X0 (forall y1 ((R_N(x,X0) & R_in(X0,y1)) -> (x = y1)))"


def test_worked_example_p_implies_delta_box():
    alpha = correspondent_direct(P("p -> Box(p; top)"))
    expected = fo.Exists(X0, fo.And((fo.RelN(x, X0), fo.Exists(y1, fo.And((fo.RelNi(X0, y1), fo.Eq(y1, x)))))))
    assert same_on_small_frames(alpha, expected)


def test_worked_example_nullary_box():
    phi = P("Box(; p) -> Box(p; top)")
    alpha = correspondent_direct(phi)
    expected = fo.Forall(X0, fo.Implies(fo.RelN(x, X0), fo.Exists(X1, fo.And((
        fo.RelN(x, X1), fo.Exists(y1, fo.And((fo.RelNi(X1, y1), fo.RelNi(X0, y1))))
    )))))
    assert same_on_small_frames(alpha, expected)
    # fails when x has the empty neighbourhood
    f = NeighbourhoodFrame(1, (frozenset({frozenset()}),))
    assert not fo.eval_fo(f, {}, {x: 0}, alpha)
    assert not valid_worlds(f, phi)[0]


def test_worked_examples_match_validity():
    for text in ("Box(p; top) -> p", "p -> Box(p; top)", "Box(; p) -> Box(p; top)"):
        phi = P(text)
        alpha = correspondent_direct(phi)
        for f in SMALL:
            assert np.array_equal(valid_worlds(f, phi), fo.world_table(f, alpha, x)[0])


def test_corpus_correspondents_are_first_order_in_x():
    for phi in correspondence_corpus():
        alpha = correspondent_direct(phi)
        assert not fo.predicates(alpha)
        assert fo.free_vars(alpha) <= {x}
        assert fo.is_well_sorted(alpha)
        # an antecedent without disjuncts (bot) yields a closed formula
        raw = correspondent_direct(phi, simplify=False)
        assert fo.free_vars(raw) <= {x}
    assert fo.free_vars(correspondent_direct(P("Box(p; top) -> p"), simplify=False)) == {x}


def test_corpus_correspondence_on_frames():
    frames = SMALL + [random_frame(3, s) for s in range(25)]
    for phi in correspondence_corpus():
        alpha = correspondent_direct(phi)
        for f in frames:
            assert np.array_equal(valid_worlds(f, phi), fo.world_table(f, alpha, x)[0]), (phi, f)


def test_output_is_deterministic():
    for phi in correspondence_corpus():
        assert print_fo(correspondent_direct(phi)) == print_fo(correspondent_direct(P(print_inl(phi))))


def test_bot_antecedent_gives_true():
    assert correspondent_direct(P("bot -> p")) == fo.TRUE
    assert correspondent_direct(P("p -> p")) == fo.TRUE


def test_not_sahlqvist_raises():
    with pytest.raises(NotSahlqvistError) as info:
        correspondent_direct(P("p -> ~p"))
    assert info.value.verdict.verdict.label == "NotSahlqvist"
    with pytest.raises(NotSahlqvistError):
        correspondent_direct(P("Box(p; Box(q; top)) -> p"))


def test_malformed_decomposition():
    bad = Node(Role.DELTA, P("Box(p; q)"), (Node(Role.PROP, P("p")), Node(Role.PROP, P("q"))))
    with pytest.raises(MalformedDecomposition):
        antecedent_normal_form(bad, x)
    with pytest.raises(MalformedDecomposition):
        antecedent_normal_form(Node(Role.AND, P("p & q"), (Node(Role.PROP, P("p")),)), x)
