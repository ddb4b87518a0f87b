import random

import pytest

from conftest import P, VARS, corpus
from inlcorr.bimodal import correspondent_via_bimodal
from inlcorr.classifier import (
    BOX_ROLES,
    Role,
    Verdict,
    classify,
    is_inl_sahlqvist_antecedent,
    is_simple_antecedent,
    is_very_simple_antecedent,
)
from inlcorr.correspondence import correspondent_direct
from inlcorr.formula import Implies, expand, is_negative, is_pseudo_boxed_atom, is_pure
from inlcorr.semantics import random_formula


def test_very_simple_examples():
    assert is_very_simple_antecedent(P("Box(p; q)"))
    assert is_very_simple_antecedent(P("Box(p; top)")).role is Role.DELTA
    assert is_very_simple_antecedent(P("Box(p; q & q)")) is None


def test_simple_examples():
    assert is_simple_antecedent(P("Box(p; p & q)")).role is Role.BOX_ZETA
    assert is_simple_antecedent(P("~Box(~p; top)")).role is Role.PBA
    assert is_simple_antecedent(P("Box(p; ~q)")) is None


def test_full_examples():
    assert is_inl_sahlqvist_antecedent(P("Box(p; ~q)")).role is Role.BOX_GAMMA
    assert is_inl_sahlqvist_antecedent(P("p | Box(q; top)")).role is Role.OR
    assert is_inl_sahlqvist_antecedent(P("Box(p; Box(q; top))")) is None


@pytest.mark.parametrize(
    "text, verdict",
    [
        ("Box(p; top) -> p", Verdict.VERY_SIMPLE),
        ("Box(p; p) -> Box(; p)", Verdict.VERY_SIMPLE),
        ("p -> ~p", Verdict.NOT_SAHLQVIST),
        ("p", Verdict.NOT_SAHLQVIST),
        ("~Box(~p; top) -> p", Verdict.SIMPLE),
        ("Box(p; ~q) -> q", Verdict.FULL),
        ("p | q -> p", Verdict.FULL),
        ("Box(p; Box(q; top)) -> p", Verdict.NOT_SAHLQVIST),
    ],
)
def test_classify_examples(text, verdict):
    assert classify(P(text)).verdict is verdict


def test_pure_universal_coordinate_is_always_theta():
    node = is_inl_sahlqvist_antecedent(P("Box(p; ~Box(; bot))"))
    assert node.role is Role.DELTA and node.children[-1].role is Role.THETA


def test_implications_in_antecedent_are_expanded():
    # ~p | q is a full-tier antecedent once the arrow is unfolded
    assert classify(P("(p -> q) -> q")).verdict is Verdict.FULL


def test_mixed_theta_nabla_chain_is_simple():
    phi = P("~Box(~~Box(~p; Box(; top)); bot) -> p")
    cls = classify(phi)
    assert cls.verdict is Verdict.SIMPLE
    assert cls.decomposition.role is Role.PBA


def test_decomposition_json():
    data = classify(P("Box(p, q; top) -> p")).to_json()
    assert data["verdict"] == "VerySimple"
    assert data["decomposition"]["role"] == "delta"
    assert [c["role"] for c in data["decomposition"]["children"]] == ["prop", "prop", "pure-theta"]


def _antecedents(n, seed):
    rng = random.Random(seed)
    return [random_formula(rng.randint(0, 3), VARS, rng) for _ in range(n)]


def _check_roles(node):
    f = node.formula
    if node.role is Role.PBA:
        assert is_pseudo_boxed_atom(f)
    elif node.role is Role.NEGATIVE:
        assert is_negative(f)
    elif node.role is Role.THETA:
        assert is_pure(f)
    elif node.role in BOX_ROLES:
        assert len(node.children) == f.arity + 1
    for c in node.children:
        _check_roles(c)


def test_tier_containment_on_random_corpus():
    seen = set()
    for phi in _antecedents(500, 13):
        vs, s, full = (is_very_simple_antecedent(phi), is_simple_antecedent(phi), is_inl_sahlqvist_antecedent(phi))
        if vs is not None:
            assert s is not None
        if s is not None:
            assert full is not None
        for node in (vs, s, full):
            if node is not None:
                _check_roles(node)
        seen.add((vs is not None, s is not None, full is not None))
    assert (True, True, True) in seen and (False, False, True) in seen and (False, False, False) in seen


def test_pseudo_boxed_atoms_are_simple_antecedents():
    count = 0
    for phi in _antecedents(500, 17) + [P("~Box(~(p & ~Box(~q; top)); bot)")]:
        if is_pseudo_boxed_atom(phi):
            count += 1
            assert is_simple_antecedent(phi) is not None
    assert count > 10


def test_classify_never_disagrees_with_correspondence():
    rng = random.Random(21)
    ants = _antecedents(400, 19)
    cons = corpus(50, depth=2, seed=23)
    tried = 0
    for a in ants:
        phi = Implies(a, rng.choice(cons))
        cls = classify(phi)
        if cls.is_sahlqvist:
            tried += 1
            correspondent_direct(phi)
            correspondent_via_bimodal(phi)
            assert cls.antecedent == expand(a)
    assert tried > 50
