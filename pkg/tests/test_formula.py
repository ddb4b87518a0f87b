from hypothesis import given

from conftest import P, corpus, formulas
from inlcorr.formula import (
    Bot,
    Box,
    Not,
    Polarity,
    Prop,
    Top,
    depth,
    expand,
    is_negative,
    is_positive,
    is_pseudo_boxed_atom,
    is_pure,
    nabla,
    nabla_parts,
    polarity,
    substitute_props,
    variables,
)

p, q = Prop("p"), Prop("q")


def test_polarity_examples():
    assert polarity(p, "p") is Polarity.POSITIVE
    assert polarity(Not(p), "p") is Polarity.NEGATIVE
    assert polarity(Box((p,), Not(p)), "p") is Polarity.BOTH
    assert polarity(q, "p") is Polarity.ABSENT


def test_polarity_of_implication_and_biconditional():
    assert polarity(P("p -> q"), "p") is Polarity.NEGATIVE
    assert polarity(P("p -> q"), "q") is Polarity.POSITIVE
    assert polarity(P("(p -> q) -> q"), "p") is Polarity.POSITIVE
    assert polarity(P("p <-> q"), "p") is Polarity.BOTH


def test_positive_negative_examples():
    assert is_positive(P("p & Box(q; q)"))
    assert is_negative(P("~p | ~q"))
    assert is_positive(Top()) and is_negative(Top())
    assert not is_positive(P("~p")) and not is_negative(P("p | ~q"))


def test_is_pure_examples():
    assert is_pure(P("Box(top; bot)"))
    assert not is_pure(p)
    assert is_pure(P("Box(; Box(; top))"))


def test_pseudo_boxed_atom_examples():
    assert is_pseudo_boxed_atom(P("p & q"))
    assert is_pseudo_boxed_atom(P("~Box(~p; top)"))
    assert not is_pseudo_boxed_atom(P("~Box(~p; q)"))
    assert is_pseudo_boxed_atom(nabla(nabla(p, Top()), P("Box(; bot)")))
    assert not is_pseudo_boxed_atom(P("p | q"))
    assert not is_pseudo_boxed_atom(P("~Box(p; top)"))
    assert nabla_parts(P("~Box(~p; top)")) == (p, Top())


def test_substitute_props_examples():
    assert substitute_props(P("Box(p; q)"), {"p": Top()}) == P("Box(top; q)")
    assert substitute_props(P("p & p"), {"p": Bot()}) == P("bot & bot")
    assert substitute_props(q, {"p": Top()}) == q
    # simultaneous, not sequential
    assert substitute_props(P("p & q"), {"p": q, "q": p}) == P("q & p")


def test_box_accepts_lists_and_reports_arity():
    b = Box([p, q], Top())
    assert b.inst == (p, q) and b.arity == 2
    assert Box((), p).arity == 0
    assert Box((p, q), Top()) != Box((q, p), Top())


def test_variables_and_depth():
    phi = P("Box(q, p; ~p)")
    assert variables(phi) == ["p", "q"]
    assert depth(phi) == 2


@given(formulas())
def test_negation_flips_polarity(phi):
    for v in variables(phi):
        assert polarity(Not(phi), v) is polarity(phi, v).flip()


@given(formulas())
def test_polarity_stable_under_expansion(phi):
    flat = expand(phi)
    for v in variables(phi):
        assert polarity(phi, v) is polarity(flat, v)


@given(formulas())
def test_pure_is_positive_and_negative(phi):
    if is_pure(phi):
        assert is_positive(phi) and is_negative(phi)


def test_pseudo_boxed_atoms_are_positive():
    zetas = [P(s) for s in ("p", "top & q", "~Box(~(p & ~Box(~q; bot)); top)", "~Box(~~Box(~p; top); Box(; bot))")]
    for z in zetas:
        assert is_pseudo_boxed_atom(z) and is_positive(z)
    for phi in corpus(300):
        if is_pseudo_boxed_atom(phi):
            assert is_positive(phi)
