import random

from hypothesis import strategies as hs

from inlcorr.formula import And, Bot, Box, Iff, Implies, Not, Or, Prop, Top
from inlcorr.parser import parse_inl
from inlcorr.semantics import random_formula

VARS = ("p", "q")


def P(text):
    return parse_inl(text)


def leaves(names=VARS):
    return hs.one_of(hs.sampled_from([Prop(n) for n in names]), hs.just(Top()), hs.just(Bot()))


def _extend(children):
    return hs.one_of(
        children.map(Not),
        hs.builds(And, children, children),
        hs.builds(Or, children, children),
        hs.builds(Implies, children, children),
        hs.builds(Iff, children, children),
        hs.builds(Box, hs.lists(children, max_size=3).map(tuple), children),
    )


def formulas(names=VARS, max_leaves=12):
    return hs.recursive(leaves(names), _extend, max_leaves=max_leaves)


def corpus(size, depth=3, seed=7):
    rng = random.Random(seed)
    return [random_formula(depth, VARS, rng) for _ in range(size)]


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
