"""Recursive-descent parser for potentials and ring-element strings.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'? base ('^' '-'? INT)?
    base   := NUMBER | COORD | 'r' | '(' expr ')'

Numbers are integers or finite decimals, both converted exactly; ``a/b`` is
ordinary division by a literal. Coordinates are ``x, y, z`` (as far as the
dimension allows) or ``q1 .. qn``. Division is only allowed by ``c * r^k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .ring import COORD_NAMES, RingElem


class ParseError(ValueError):
    def __init__(self, message: str, position: int, source: str = ""):
        self.message = message
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position}")

    def pretty(self) -> str:
        if not self.source:
            return str(self)
        return f"{self}\n  {self.source}\n  {' ' * self.position}^"


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int


@dataclass(frozen=True)
class Coord:
    index: int
    pos: int


@dataclass(frozen=True)
class Radial:
    pos: int


@dataclass(frozen=True)
class Neg:
    operand: Node
    pos: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node
    pos: int


@dataclass(frozen=True)
class Pow:
    base: Node
    exponent: int
    pos: int


Node = Union[Num, Coord, Radial, Neg, BinOp, Pow]


@dataclass(frozen=True)
class PotentialExpr:
    source: str
    dim: int
    root: Node

    def to_ring(self) -> RingElem:
        return lower(self.root, self.dim, self.source)


# -- tokens -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    i = 0
    while True:
        while i < len(src) and src[i].isspace():
            i += 1
        if i >= len(src):
            break
        m = _TOKEN.match(src, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {src[i]!r}", i, src)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), start))
        i = m.end()
    out.append(Token("end", "", len(src)))
    return out


def _coordinate_index(name: str, dim: int) -> int | None:
    names = COORD_NAMES.get(dim, ())
    if name in names:
        return names.index(name)
    m = re.fullmatch(r"q([1-9]\d*)", name)
    if m and int(m.group(1)) <= dim:
        return int(m.group(1)) - 1
    return None


class _Parser:
    def __init__(self, src: str, dim: int):
        self.src = src
        self.dim = dim
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.pos, self.src)

    def parse(self) -> Node:
        if self.tok.kind == "end":
            self.fail("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take()
            node = BinOp(op.text, node, self.term(), op.pos)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.take()
            node = BinOp(op.text, node, self.factor(), op.pos)
        return node

    def factor(self) -> Node:
        if self.at_op("-"):
            op = self.take()
            return Neg(self.powered(), op.pos)
        return self.powered()

    def powered(self) -> Node:
        base = self.base()
        if self.at_op("^"):
            op = self.take()
            sign = 1
            if self.at_op("-"):
                self.take()
                sign = -1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.fail("exponent must be an integer literal")
            self.take()
            return Pow(base, sign * int(t.text), op.pos)
        return base

    def base(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(Fraction(t.text), t.pos)
        if t.kind == "name":
            self.take()
            if t.text == "r":
                return Radial(t.pos)
            idx = _coordinate_index(t.text, self.dim)
            if idx is None:
                self.fail(f"unknown coordinate {t.text!r} for dimension {self.dim}", t)
            return Coord(idx, t.pos)
        if self.at_op("("):
            self.take()
            node = self.expr()
            if not self.at_op(")"):
                self.fail("expected ')'")
            self.take()
            return node
        if t.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {t.text!r}")


def lower(node: Node, dim: int, source: str = "") -> RingElem:
    if isinstance(node, Num):
        return RingElem.const(dim, node.value)
    if isinstance(node, Coord):
        return RingElem.coord(dim, node.index)
    if isinstance(node, Radial):
        return RingElem.radial(dim, 1)
    if isinstance(node, Neg):
        return -lower(node.operand, dim, source)
    if isinstance(node, Pow):
        base = lower(node.base, dim, source)
        try:
            return base ** node.exponent
        except ValueError:
            raise ParseError("negative power of a non-monomial", node.pos, source) from None
    if isinstance(node, BinOp):
        a = lower(node.left, dim, source)
        b = lower(node.right, dim, source)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b.is_zero():
            raise ParseError("division by zero", node.pos, source)
        try:
            return a * b.inverse()
        except ValueError:
            raise ParseError("division by a non-monomial (only c*r^k is allowed)", node.pos, source) from None
    raise TypeError(f"unknown node {node!r}")


def parse_potential(src: str, dim: int) -> PotentialExpr:
    root = _Parser(src, dim).parse()
    expr = PotentialExpr(src, dim, root)
    expr.to_ring()  # reject anything that does not lower
    return expr


def parse_ring_elem(src: str, dim: int) -> RingElem:
    return parse_potential(src, dim).to_ring()
