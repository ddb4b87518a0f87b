"""Concrete syntax for INL formulas and printers for every AST in the package.

Grammar, loosest binding first::

    formula ::= iff
    iff     ::= impl ( "<->" impl )*
    impl    ::= disj ( "->" impl )?
    disj    ::= conj ( "|" conj )*
    conj    ::= neg ( "&" neg )*
    neg     ::= "~" neg | atom
    atom    ::= "top" | "bot" | ident
              | "Box" "(" [ formula { "," formula } ] ";" formula ")"
              | "(" formula ")"
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable

from inlcorr import bimodal as bm
from inlcorr import fo
from inlcorr.formula import And, Bot, Box, Formula, Iff, Implies, Not, Or, Prop, Top

KEYWORDS = {"top", "bot", "Box"}
FORMATS = ("text", "json", "latex")


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError("span must satisfy 0 <= start <= end")


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan, text: str):
        self.message = message
        self.span = span
        self.text = text
        super().__init__(f"{message} at {span.start}:{span.end}")

    def pretty(self) -> str:
        caret = " " * self.span.start + "^" * max(1, self.span.end - self.span.start)
        return f"parse error: {self.message}\n  {self.text}\n  {caret}"

    def to_json(self) -> dict:
        return {
            "error": "ParseError",
            "message": self.message,
            "span": {"start": self.span.start, "end": self.span.end},
        }


_TOKEN = re.compile(r"\s*(?:(?P<sym><->|->|[~&|(),;])|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<bad>\S))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "sym", "ident", "kw" or "eof"
    value: str
    span: SourceSpan


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group("bad") is not None:
            s = m.start("bad")
            raise ParseError(f"unexpected character {m.group('bad')!r}", SourceSpan(s, s + 1), text)
        group = "sym" if m.group("sym") else "ident"
        value = m.group(group)
        kind = "kw" if group == "ident" and value in KEYWORDS else group
        toks.append(_Tok(kind, value, SourceSpan(m.start(group), m.end(group))))
        pos = m.end()
    toks.append(_Tok("eof", "", SourceSpan(len(text), len(text))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at(self, value: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.value == value

    def fail(self, expected: str):
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.value)
        raise ParseError(f"expected {expected}, got {got}", t.span, self.text)

    def eat(self, value: str, expected: str | None = None) -> _Tok:
        if not self.at(value):
            self.fail(expected or repr(value))
        t = self.tok
        self.i += 1
        return t

    def formula(self) -> Formula:
        out = self.impl()
        while self.at("<->"):
            self.i += 1
            out = Iff(out, self.impl())
        return out

    def impl(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.at("|"):
            self.i += 1
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.neg()
        while self.at("&"):
            self.i += 1
            out = And(out, self.neg())
        return out

    def neg(self) -> Formula:
        if self.at("~"):
            self.i += 1
            return Not(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "kw" and t.value == "top":
            self.i += 1
            return Top()
        if t.kind == "kw" and t.value == "bot":
            self.i += 1
            return Bot()
        if t.kind == "ident":
            self.i += 1
            return Prop(t.value)
        if t.kind == "kw" and t.value == "Box":
            self.i += 1
            self.eat("(", "'(' after Box")
            inst: list[Formula] = []
            if not self.at(";"):
                inst.append(self.formula())
                while self.at(","):
                    self.i += 1
                    inst.append(self.formula())
                if not self.at(";"):
                    self.fail("',' or ';'")
            self.eat(";")
            univ = self.formula()
            self.eat(")", "')' closing Box")
            return Box(tuple(inst), univ)
        if self.at("("):
            self.i += 1
            out = self.formula()
            self.eat(")", "')'")
            return out
        self.fail("a formula")


def parse_inl(text: str) -> Formula:
    p = _Parser(text)
    out = p.formula()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return out


# -- INL printing ---------------------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
# binding power required of (left, right) operands
_OPERANDS = {Iff: (1, 2), Implies: (3, 2), Or: (3, 4), And: (4, 5)}
_TEXT_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_LATEX_OPS = {Iff: r"\leftrightarrow", Implies: r"\to", Or: r"\lor", And: r"\land"}


def _inl_str(phi: Formula, need: int, latex: bool) -> str:
    if isinstance(phi, Prop):
        return phi.name
    if isinstance(phi, Top):
        return r"\top" if latex else "top"
    if isinstance(phi, Bot):
        return r"\bot" if latex else "bot"
    if isinstance(phi, Box):
        inst = ", ".join(_inl_str(a, 1, latex) for a in phi.inst)
        univ = _inl_str(phi.univ, 1, latex)
        if latex:
            return rf"\Box_{{{phi.arity}}}({inst}; {univ})"
        return f"Box({inst}; {univ})" if inst else f"Box(; {univ})"
    prec = _PREC[type(phi)]
    if isinstance(phi, Not):
        s = (r"\neg " if latex else "~") + _inl_str(phi.arg, 5, latex)
    else:
        ln, rn = _OPERANDS[type(phi)]
        op = (_LATEX_OPS if latex else _TEXT_OPS)[type(phi)]
        s = f"{_inl_str(phi.left, ln, latex)} {op} {_inl_str(phi.right, rn, latex)}"
    return f"({s})" if prec < need else s


def inl_to_json(phi: Formula) -> dict:
    if isinstance(phi, Prop):
        return {"op": "prop", "name": phi.name}
    if isinstance(phi, Top):
        return {"op": "top"}
    if isinstance(phi, Bot):
        return {"op": "bot"}
    if isinstance(phi, Not):
        return {"op": "not", "arg": inl_to_json(phi.arg)}
    if isinstance(phi, Box):
        return {"op": "box", "inst": [inl_to_json(a) for a in phi.inst], "univ": inl_to_json(phi.univ)}
    tag = {And: "and", Or: "or", Implies: "implies", Iff: "iff"}[type(phi)]
    return {"op": tag, "left": inl_to_json(phi.left), "right": inl_to_json(phi.right)}


def inl_from_json(data: dict) -> Formula:
    op = data["op"]
    if op == "prop":
        return Prop(data["name"])
    if op == "top":
        return Top()
    if op == "bot":
        return Bot()
    if op == "not":
        return Not(inl_from_json(data["arg"]))
    if op == "box":
        return Box(tuple(inl_from_json(a) for a in data["inst"]), inl_from_json(data["univ"]))
    cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}.get(op)
    if cls is None:
        raise ValueError(f"unknown INL node {op!r}")
    return cls(inl_from_json(data["left"]), inl_from_json(data["right"]))


def _check_format(format: str) -> None:
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")


def print_inl(phi: Formula, format: str = "text") -> str:
    _check_format(format)
    if format == "json":
        return json.dumps(inl_to_json(phi), sort_keys=True)
    return _inl_str(phi, 0, format == "latex")


# -- first-order printing ---------------------------------------------------------------------

def _pred_name(name: str) -> str:
    return name[:1].upper() + name[1:]


def _latex_var(v: fo.Var) -> str:
    m = re.fullmatch(r"([A-Za-z]+)(\d+)('*)", v.name)
    if m:
        return f"{m.group(1)}_{{{m.group(2)}}}{m.group(3)}"
    return v.name


def _fo_str(a: fo.FOFormula, latex: bool, top: bool = True) -> str:
    V = _latex_var if latex else (lambda v: v.name)
    if isinstance(a, fo.Pred):
        return f"{_pred_name(a.name)}{V(a.arg)}" if latex else f"{_pred_name(a.name)}({a.arg.name})"
    if isinstance(a, fo.RelNi):
        return rf"R_{{\ni}}{V(a.set)}{V(a.world)}" if latex else f"R_in({a.set.name},{a.world.name})"
    if isinstance(a, fo.RelN):
        return rf"R_{{N}}{V(a.world)}{V(a.set)}" if latex else f"R_N({a.world.name},{a.set.name})"
    if isinstance(a, fo.Eq):
        s = f"{V(a.left)} = {V(a.right)}"
        return s if top else f"({s})"
    if isinstance(a, fo.Verum):
        return r"\top" if latex else "true"
    if isinstance(a, fo.Falsum):
        return r"\bot" if latex else "false"
    if isinstance(a, fo.Not):
        if latex and isinstance(a.arg, fo.Eq):
            return f"{V(a.arg.left)} \\neq {V(a.arg.right)}"
        return (r"\neg " if latex else "~") + _fo_str(a.arg, latex, top=False)
    if isinstance(a, (fo.Forall, fo.Exists)):
        if latex:
            q = r"\forall " if isinstance(a, fo.Forall) else r"\exists "
            return f"{q}{V(a.var)}\\,({_fo_str(a.body, latex)})"
        q = "forall" if isinstance(a, fo.Forall) else "exists"
        return f"{q} {a.var.name} ({_fo_str(a.body, latex)})"
    if isinstance(a, (fo.And, fo.Or, fo.Implies)):
        if isinstance(a, fo.Implies):
            parts, op = [a.left, a.right], (r"\to" if latex else "->")
        elif isinstance(a, fo.And):
            parts, op = list(a.args), (r"\land" if latex else "&")
        else:
            parts, op = list(a.args), (r"\lor" if latex else "|")
        if not parts:
            return _fo_str(fo.TRUE if isinstance(a, fo.And) else fo.FALSE, latex)
        s = f" {op} ".join(_fo_str(p, latex, top=False) for p in parts)
        return s if top else f"({s})"
    raise TypeError(a)


_Q_TAGS = {(fo.Forall, fo.Sort.WORLD): "forall_w", (fo.Exists, fo.Sort.WORLD): "exists_w",
           (fo.Forall, fo.Sort.SUBSET): "forall_s", (fo.Exists, fo.Sort.SUBSET): "exists_s"}


def fo_to_json(a: fo.FOFormula) -> dict:
    if isinstance(a, fo.Pred):
        return {"op": "pred", "name": a.name, "arg": a.arg.name}
    if isinstance(a, fo.RelNi):
        return {"op": "rel_ni", "set": a.set.name, "world": a.world.name}
    if isinstance(a, fo.RelN):
        return {"op": "rel_n", "world": a.world.name, "set": a.set.name}
    if isinstance(a, fo.Eq):
        return {"op": "eq", "left": a.left.name, "right": a.right.name}
    if isinstance(a, fo.Verum):
        return {"op": "true"}
    if isinstance(a, fo.Falsum):
        return {"op": "false"}
    if isinstance(a, fo.Not):
        return {"op": "not", "arg": fo_to_json(a.arg)}
    if isinstance(a, (fo.And, fo.Or)):
        return {"op": "and" if isinstance(a, fo.And) else "or", "args": [fo_to_json(c) for c in a.args]}
    if isinstance(a, fo.Implies):
        return {"op": "implies", "left": fo_to_json(a.left), "right": fo_to_json(a.right)}
    if isinstance(a, (fo.Forall, fo.Exists)):
        return {"op": _Q_TAGS[(type(a), a.var.sort)], "var": a.var.name, "body": fo_to_json(a.body)}
    raise TypeError(a)


def fo_from_json(data: dict) -> fo.FOFormula:
    op = data["op"]
    W, S = fo.wvar, fo.svar
    if op == "pred":
        return fo.Pred(data["name"], W(data["arg"]))
    if op == "rel_ni":
        return fo.RelNi(S(data["set"]), W(data["world"]))
    if op == "rel_n":
        return fo.RelN(W(data["world"]), S(data["set"]))
    if op == "eq":
        return fo.Eq(W(data["left"]), W(data["right"]))
    if op == "true":
        return fo.TRUE
    if op == "false":
        return fo.FALSE
    if op == "not":
        return fo.Not(fo_from_json(data["arg"]))
    if op in ("and", "or"):
        args = tuple(fo_from_json(c) for c in data["args"])
        return fo.And(args) if op == "and" else fo.Or(args)
    if op == "implies":
        return fo.Implies(fo_from_json(data["left"]), fo_from_json(data["right"]))
    for (q, sort), tag in _Q_TAGS.items():
        if tag == op:
            return q(fo.Var(data["var"], sort), fo_from_json(data["body"]))
    raise ValueError(f"unknown first-order node {op!r}")


def print_fo(a: fo.FOFormula, format: str = "text") -> str:
    _check_format(format)
    if format == "json":
        return json.dumps(fo_to_json(a), sort_keys=True)
    return _fo_str(a, format == "latex")


# -- bimodal printing -------------------------------------------------------------------------

_B_UNARY_TEXT = {bm.DiaN: "<N>", bm.BoxN: "[N]", bm.DiaNi: "<in>", bm.BoxNi: "[in]", bm.Neg: "~"}
_B_UNARY_LATEX = {bm.DiaN: r"\Diamond_{N}", bm.BoxN: r"\Box_{N}", bm.DiaNi: r"\Diamond_{\ni}",
                  bm.BoxNi: r"\Box_{\ni}", bm.Neg: r"\neg"}
_B_TAGS = {bm.Neg: "not", bm.DiaN: "dia_n", bm.BoxN: "box_n", bm.DiaNi: "dia_ni", bm.BoxNi: "box_ni",
           bm.Conj: "and", bm.Disj: "or", bm.Impl: "implies"}


def _b_str(chi: bm.BimodalFormula, latex: bool, top: bool = True) -> str:
    if isinstance(chi, bm.Atom):
        return chi.name
    if isinstance(chi, bm.Verum):
        return r"\top" if latex else "top"
    if isinstance(chi, bm.Falsum):
        return r"\bot" if latex else "bot"
    if type(chi) in _B_UNARY_TEXT:
        op = (_B_UNARY_LATEX if latex else _B_UNARY_TEXT)[type(chi)]
        return op + (" " if latex else "") + _b_str(chi.arg, latex, top=False)
    ops = {bm.Conj: ("&", r"\land"), bm.Disj: ("|", r"\lor"), bm.Impl: ("->", r"\to")}[type(chi)]
    s = f"{_b_str(chi.left, latex, False)} {ops[latex]} {_b_str(chi.right, latex, False)}"
    return s if top else f"({s})"


def bimodal_to_json(chi: bm.BimodalFormula) -> dict:
    if isinstance(chi, bm.Atom):
        return {"op": "atom", "name": chi.name}
    if isinstance(chi, bm.Verum):
        return {"op": "top"}
    if isinstance(chi, bm.Falsum):
        return {"op": "bot"}
    tag = _B_TAGS[type(chi)]
    if isinstance(chi, (bm.Conj, bm.Disj, bm.Impl)):
        return {"op": tag, "left": bimodal_to_json(chi.left), "right": bimodal_to_json(chi.right)}
    return {"op": tag, "arg": bimodal_to_json(chi.arg)}


def print_bimodal(chi: bm.BimodalFormula, format: str = "text") -> str:
    _check_format(format)
    if format == "json":
        return json.dumps(bimodal_to_json(chi), sort_keys=True)
    return _b_str(chi, format == "latex")


PRINTERS: dict[str, Callable] = {"inl": print_inl, "fo": print_fo, "bimodal": print_bimodal}
