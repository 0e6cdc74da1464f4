"""Infon terms: a join semilattice with zero and a weak pseudocomplement.

Terms are built from generators and 0 by + (join) and * (weak
pseudocomplement). Reading 0 as truth, + as conjunction and * as
implication turns a term into a formula of the original calculus, and
that calculus decides the term order: s >= t exactly when the formula
for s entails the formula for t. There is no rewriting to normal form
here; the engine is the decision procedure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .calculus import CalculusVariant
from .engine import entails
from .syntax import Formula, ParseError, ReservedNameError, atom, conj, imp, top


class InfonTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Zero(InfonTerm):
    pass


@dataclass(frozen=True)
class Gen(InfonTerm):
    name: str


@dataclass(frozen=True)
class Join(InfonTerm):
    l: InfonTerm
    r: InfonTerm


@dataclass(frozen=True)
class PComp(InfonTerm):
    l: InfonTerm
    r: InfonTerm


def term_size(t: InfonTerm) -> int:
    if isinstance(t, (Zero, Gen)):
        return 1
    return 1 + term_size(t.l) + term_size(t.r)


def term_to_formula(t: InfonTerm) -> Formula:
    if isinstance(t, Zero):
        return top()
    if isinstance(t, Gen):
        return atom(t.name)
    if isinstance(t, Join):
        return conj(term_to_formula(t.l), term_to_formula(t.r))
    if isinstance(t, PComp):
        return imp(term_to_formula(t.l), term_to_formula(t.r))
    raise TypeError(f"not an infon term: {t!r}")


def term_geq(s: InfonTerm, t: InfonTerm) -> bool:
    """Whether s >= t in the free algebra, decided through the calculus."""
    return entails(
        [term_to_formula(s)], term_to_formula(t), CalculusVariant.ORIGINAL
    ).entailed


def term_equal(s: InfonTerm, t: InfonTerm) -> bool:
    return term_geq(s, t) and term_geq(t, s)


# ------------------------------------------------------------- grammar

_TOKEN = re.compile(r"(0)|([+*()])|([A-Za-z_][A-Za-z0-9_']*)|(\s+)|(.)")


def _tokenize(text: str):
    out = []
    for m in _TOKEN.finditer(text):
        zero, op, ident, space, bad = m.groups()
        if space is not None:
            continue
        if bad is not None:
            raise ParseError(f"unexpected character {bad!r}", m.start())
        if zero is not None:
            out.append(("zero", "0", m.start()))
        elif op is not None:
            out.append((op, op, m.start()))
        else:
            out.append(("ident", ident, m.start()))
    return out


class _TermParser:
    def __init__(self, toks, text):
        self.toks = toks
        self.pos = 0
        self.end = len(text)

    def peek(self):
        if self.pos < len(self.toks):
            return self.toks[self.pos]
        return None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end)
        self.pos += 1
        return tok

    def sum_(self) -> InfonTerm:
        t = self.prod()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "+":
                return t
            self.pos += 1
            t = Join(t, self.prod())

    def prod(self) -> InfonTerm:
        t = self.unit()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "*":
                return t
            self.pos += 1
            t = PComp(t, self.unit())

    def unit(self) -> InfonTerm:
        kind, value, at = self.take()
        if kind == "zero":
            return Zero()
        if kind == "ident":
            if value.startswith("_"):
                raise ReservedNameError(
                    f"identifier {value!r} uses the reserved prefix", at
                )
            return Gen(value)
        if kind == "(":
            t = self.sum_()
            kind2, _, at2 = self.take()
            if kind2 != ")":
                raise ParseError("expected ')'", at2)
            return t
        raise ParseError(f"unexpected token {value!r}", at)


def parse_term(text: str) -> InfonTerm:
    parser = _TermParser(_tokenize(text), text)
    t = parser.sum_()
    tok = parser.peek()
    if tok is not None:
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
    return t


def render_term(t: InfonTerm) -> str:
    return _render(t, 0, False)


def _render(t: InfonTerm, level: int, right: bool) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Gen):
        return t.name
    if isinstance(t, Join):
        s = f"{_render(t.l, 1, False)} + {_render(t.r, 1, True)}"
        return f"({s})" if level > 1 or (level == 1 and right) else s
    s = f"{_render(t.l, 2, False)} * {_render(t.r, 2, True)}"
    return f"({s})" if level > 2 or (level == 2 and right) else s


def random_term(rng, max_nodes: int = 12, gens=("a", "b", "c")) -> InfonTerm:
    """Uniform-ish term with at most max_nodes nodes, at least one."""
    if max_nodes < 3 or rng.random() < 0.3:
        if rng.random() < 0.15:
            return Zero()
        return Gen(rng.choice(gens))
    left = rng.randrange(1, max_nodes - 1)
    ctor = Join if rng.random() < 0.5 else PComp
    return ctor(
        random_term(rng, left, gens),
        random_term(rng, max_nodes - 1 - left, gens),
    )
