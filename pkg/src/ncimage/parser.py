"""Recursive-descent parser for the polynomial expression language.

    expr   := term (('+' | '-') term)*
    term   := ['-'] factor ('*' factor)*
    factor := atom ('^' nat)?
    atom   := var | rational | root | '(' expr ')' | '[' expr (',' expr)+ ']'
    var    := 'x' nat          rational := nat ('/' nat)?     root := 'z{' nat '}'

Brackets with more than two entries are right-normed: [a, b, c] = [a, [b, c]].
The leading '-' on a term and the root-of-unity atom z{m} extend the core
grammar so that every printed polynomial parses back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import ParseError
from .freealg import NcPoly, bracket
from .scalars import QQ, Cyc, CyclotomicField, zeta

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<var>x\d+)|(?P<root>z\{\d+\})|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*^(),\[\]])|(?P<ident>[A-Za-z_]\w*)"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "ident":
            raise ParseError(f"unknown identifier {tok!r}", line, col)
        if kind == "var" and int(tok[1:]) < 1:
            raise ParseError("variables are numbered from x1", line, col)
        if kind != "ws":
            tokens.append(Token(kind, tok, line, col))
        for ch in tok:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Root:
    m: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Add:
    terms: tuple  # ((sign, node), ...) with sign '+' or '-'; the first sign is '+'


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Group:
    arg: object


@dataclass(frozen=True)
class Bracket:
    items: tuple


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def cur(self):
        return self.toks[self.i]

    def take(self, text=None, kind=None):
        t = self.cur
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text else kind
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {want}, found {got}", t.line, t.col)
        self.i += 1
        return t

    def expr(self):
        terms = [("+", self.term())]
        while self.cur.text in ("+", "-"):
            sign = self.take().text
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 else Add(tuple(terms))

    def term(self):
        if self.cur.text == "-":
            self.take()
            return Neg(self.term())
        factors = [self.factor()]
        while self.cur.text == "*":
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def factor(self):
        base = self.atom()
        if self.cur.text == "^":
            self.take()
            t = self.cur
            if t.kind != "num" or "/" in t.text:
                raise ParseError("exponent must be a natural number", t.line, t.col)
            self.take()
            return Pow(base, int(t.text))
        return base

    def atom(self):
        t = self.cur
        if t.kind == "var":
            self.take()
            return Var(int(t.text[1:]))
        if t.kind == "num":
            self.take()
            return Num(Fraction(t.text))
        if t.kind == "root":
            self.take()
            m = int(t.text[2:-1])
            if m < 1:
                raise ParseError("root-of-unity order must be positive", t.line, t.col)
            return Root(m)
        if t.text == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return Group(inner)
        if t.text == "[":
            self.take()
            items = [self.expr()]
            while self.cur.text == ",":
                self.take()
                items.append(self.expr())
            if len(items) < 2:
                raise ParseError("a bracket needs at least two entries", t.line, t.col)
            self.take("]")
            return Bracket(tuple(items))
        if t.kind == "eof":
            raise ParseError("unexpected end of input", t.line, t.col)
        if t.text in ")]":
            raise ParseError(f"unbalanced {t.text!r}", t.line, t.col)
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col)


def parse(text):
    """Parse text into an AST; errors carry line and column."""
    p = _Parser(text)
    node = p.expr()
    if p.cur.kind != "eof":
        t = p.cur
        if t.text in ")]":
            raise ParseError(f"unbalanced {t.text!r}", t.line, t.col)
        raise ParseError(f"unexpected {t.text!r} after expression", t.line, t.col)
    return node


def to_text(node):
    """Print an AST so that parse(to_text(a)) == a."""
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Root):
        return f"z{{{node.m}}}"
    if isinstance(node, Neg):
        return "-" + to_text(node.arg)
    if isinstance(node, Add):
        out = to_text(node.terms[0][1])
        for sign, t in node.terms[1:]:
            out += f" {sign} {to_text(t)}"
        return out
    if isinstance(node, Mul):
        return "*".join(to_text(f) for f in node.factors)
    if isinstance(node, Pow):
        return f"{to_text(node.base)}^{node.exp}"
    if isinstance(node, Group):
        return "(" + to_text(node.arg) + ")"
    if isinstance(node, Bracket):
        return "[" + ", ".join(to_text(i) for i in node.items) + "]"
    raise TypeError(f"not an AST node: {node!r}")


def _roots(node, acc):
    if isinstance(node, Root):
        acc.add(node.m)
    for child in _children(node):
        _roots(child, acc)
    return acc


def _children(node):
    if isinstance(node, (Neg, Group)):
        return [node.arg]
    if isinstance(node, Add):
        return [t for _, t in node.terms]
    if isinstance(node, Mul):
        return list(node.factors)
    if isinstance(node, Pow):
        return [node.base]
    if isinstance(node, Bracket):
        return list(node.items)
    return []


def field_for(node):
    m = 1
    for r in _roots(node, set()):
        m = m * r // gcd(m, r)
    return QQ if m in (1, 2) else CyclotomicField(m)


def lower(node, field=None):
    """AST -> NcPoly."""
    field = field or field_for(node)
    return _lower(node, field)


def _lower(node, field):
    if isinstance(node, Var):
        return NcPoly.var(node.index, field)
    if isinstance(node, Num):
        return NcPoly.const(node.value, field)
    if isinstance(node, Root):
        return NcPoly.const(zeta(node.m), field)
    if isinstance(node, Neg):
        return -_lower(node.arg, field)
    if isinstance(node, Add):
        out = NcPoly.zero(field)
        for sign, t in node.terms:
            p = _lower(t, field)
            out = out + p if sign == "+" else out - p
        return out
    if isinstance(node, Mul):
        out = NcPoly.one(field)
        for f in node.factors:
            out = out * _lower(f, field)
        return out
    if isinstance(node, Pow):
        return _lower(node.base, field) ** node.exp
    if isinstance(node, Group):
        return _lower(node.arg, field)
    if isinstance(node, Bracket):
        return bracket(*(_lower(i, field) for i in node.items))
    raise TypeError(f"not an AST node: {node!r}")


def parse_poly(text):
    return lower(parse(text))


def poly_to_text(f):
    """Text for an NcPoly that parse_poly reads back to the same polynomial."""
    if f.is_zero():
        return "0"
    parts = []
    for w, c in f.items():
        coef, neg = _coef_text(c)
        mono = "*".join(f"x{i}" for i in w)
        if not mono:
            body = coef or "1"
        elif coef:
            body = f"{coef}*{mono}"
        else:
            body = mono
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _coef_text(c):
    """(text or '' for 1, negated?)"""
    if isinstance(c, Cyc):
        d, coords = c.canonical()
        pieces = []
        for k, v in enumerate(coords):
            if v == 0:
                continue
            q = Fraction(v)
            qs = str(abs(q.numerator)) if q.denominator == 1 else f"{abs(q.numerator)}/{q.denominator}"
            mon = "" if k == 0 else (f"z{{{d}}}" if k == 1 else f"z{{{d}}}^{k}")
            if mon and abs(q) == 1:
                body = mon
            elif mon:
                body = f"{qs}*{mon}"
            else:
                body = qs
            pieces.append(("-" if q < 0 else "+", body))
        inner = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for s, b in pieces[1:]:
            inner += f" {s} {b}"
        return f"({inner})", False
    q = Fraction(c)
    neg = q < 0
    q = abs(q)
    if q == 1:
        return "", neg
    return (str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"), neg

