import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncimage.errors import ParseError
from ncimage.freealg import NcPoly, commutator, lie_expand
from ncimage.parser import (
    Add,
    Bracket,
    Group,
    Mul,
    Neg,
    Num,
    Pow,
    Root,
    Var,
    lower,
    parse,
    parse_poly,
    poly_to_text,
    to_text,
)
from ncimage.scalars import CyclotomicField, cyc, zeta

x1, x2 = NcPoly.var(1), NcPoly.var(2)


def test_parse_examples():
    node = parse("[x1,x2]^2")
    assert isinstance(node, Pow) and node.exp == 2 and isinstance(node.base, Bracket)
    assert parse_poly("x1*x2 - x2*x1") == parse_poly("[x1,x2]")
    f = parse_poly("[x4,x3,x2,x1] - [x3,x4,x2,x1]")
    assert f == lie_expand((4, 3, 2, 1)) - lie_expand((3, 4, 2, 1))


def test_right_normed_lists():
    assert parse_poly("[x1,x2,x3]") == commutator(x1, commutator(x2, NcPoly.var(3)))


def test_precedence_and_rationals():
    assert parse_poly("2/3*x1 + x2^2") == x1.scale(Fraction(2, 3)) + x2 * x2
    assert parse_poly("-x1 - -x2") == x2 - x1
    assert parse_poly("(x1 + x2)^2") == (x1 + x2) * (x1 + x2)


def test_roots_of_unity():
    f = parse_poly("z{3}*x1")
    assert f.field == CyclotomicField(3)
    assert f.coeff((1,)) == zeta(3)
    assert parse_poly("z{2}*x1") == -x1


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("x1 + $", 1, 6),
        ("[x1, x2", 1, 8),
        ("(x1 + x2))", 1, 10),
        ("x1 +\n  foo", 2, 3),
        ("x0", 1, 1),
        ("[x1]", 1, 1),
        ("x1^x2", 1, 4),
        ("", 1, 1),
    ],
)
def test_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert (exc.value.line, exc.value.column) == (line, col)


# -- round trip on ASTs

nats = st.integers(min_value=0, max_value=30)
var = st.builds(Var, st.integers(min_value=1, max_value=9))
num = st.builds(
    lambda p, q: Num(Fraction(p, q)), st.integers(min_value=0, max_value=40), st.integers(min_value=1, max_value=9)
)
root = st.builds(Root, st.integers(min_value=1, max_value=8))


expr = st.deferred(lambda: st.one_of(term, add))
atom = st.one_of(
    var,
    num,
    root,
    st.builds(Group, expr),
    st.builds(Bracket, st.lists(expr, min_size=2, max_size=3).map(tuple)),
)
factor = st.one_of(atom, atom, atom, st.builds(Pow, atom, nats))
mul = st.builds(Mul, st.lists(factor, min_size=2, max_size=3).map(tuple))
term = st.deferred(lambda: st.one_of(factor, factor, factor, mul, st.builds(Neg, term)))
add = st.builds(
    lambda first, rest: Add((("+", first),) + tuple(rest)),
    term,
    st.lists(st.tuples(st.sampled_from("+-"), term), min_size=1, max_size=2),
)


@settings(max_examples=300, deadline=None)
@given(expr)
def test_ast_roundtrip(node):
    assert parse(to_text(node)) == node


# -- round trip on polynomials


def _random_poly(rng, field_m=None):
    terms = {}
    for _ in range(rng.randint(0, 5)):
        w = tuple(rng.randint(1, 4) for _ in range(rng.randint(0, 4)))
        if field_m:
            c = cyc(field_m, [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)])
        else:
            c = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        terms[w] = c
    return NcPoly(terms, CyclotomicField(field_m) if field_m else NcPoly.zero().field)


@pytest.mark.parametrize("m", [None, 5, 12])
def test_poly_text_roundtrip(m):
    rng = random.Random(m or 0)
    for _ in range(40):
        f = _random_poly(rng, m)
        g = parse_poly(poly_to_text(f))
        assert g.terms == f.terms


def test_lowering_is_total_on_generated_trees():
    node = parse("[x1 + 2, (x2 - x1)^3, 1/2*x3] * z{4}")
    f = lower(node)
    assert f.degree == 5
