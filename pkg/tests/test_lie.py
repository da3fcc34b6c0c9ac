import itertools
import random
from fractions import Fraction

import pytest

from ncimage.analyzer import Budget
from ncimage.errors import InvalidInputError, PreconditionError, WitnessNotFound
from ncimage.evaluator import evaluate
from ncimage.exactmat import Matrix
from ncimage.freealg import NcPoly, commutator, lie_expand, substitute
from ncimage.lie import (
    LIE4_BASIS,
    LiePoly4,
    collapse_polynomial,
    lie3_poly,
    lie3_witness,
    lie3_witness_for,
    lie4_analyze,
    lie4_basis_is_independent,
    lie4_witness,
    lie_witness,
    monomial_args,
    monomial_witness,
    sum_commutators_obstruction,
    zero_diag_commutator,
)

B = Budget(seed=9)
E = Matrix.unit


def trace_zero(rng, n, bound=9):
    a = Matrix.random(n, rng, bound)
    return a - Matrix.scalar(n, Fraction(a.trace(), n))


def ad(s, x, m):
    for _ in range(m):
        x = s @ x - x @ s
    return x


# -- monomials


def test_monomial_examples():
    x, s = monomial_witness(2, E(2, 0, 1))
    assert s == Matrix.diag([1, 2]) and x == -E(2, 0, 1)
    t = E(2, 0, 1) + E(2, 1, 0)
    x, s = monomial_witness(3, t)
    assert x == t and ad(s, x, 2) == t
    x, s = monomial_witness(2, Matrix.diag([1, -1]))
    assert ad(s, x, 1) == Matrix.diag([1, -1])


def test_monomial_errors():
    with pytest.raises(PreconditionError):
        monomial_witness(2, Matrix.identity(2))
    assert monomial_witness(3, Matrix.zero(3)) == (Matrix.zero(3), Matrix.zero(3))


def test_monomial_random_targets():
    rng = random.Random(61)
    for _ in range(100):
        n = rng.randint(1, 4)
        k = rng.randint(2, 4)
        a = Matrix.random(n, rng, 9)
        a = a - E(n, 0, 0) * a.trace()
        x, s = monomial_witness(k, a)
        assert ad(s, x, k - 1) == a


def test_monomial_args_for_words():
    rng = random.Random(62)
    a = trace_zero(rng, 3)
    for word in ((2, 1), (2, 2, 1), (3, 2, 2, 1), (1, 3, 2)):
        args = monomial_args(word, a)
        f = lie_expand(word)
        assert evaluate(f, [args[v] for v in sorted(args)], 3) == a
    with pytest.raises(InvalidInputError):
        monomial_args((1, 2, 1), a)


# -- degree 3


@pytest.mark.parametrize("alpha", [0, 5, -1, Fraction(-1, 3), 2])
def test_lie3_witness(alpha):
    rng = random.Random(63)
    f = lie3_poly(alpha)
    for n in (2, 3):
        for _ in range(5):
            a = trace_zero(rng, n)
            assert evaluate(f, lie3_witness(alpha, a), n) == a
    assert evaluate(f, lie3_witness(alpha, E(2, 0, 1)), 2) == E(2, 0, 1)
    assert lie3_witness(alpha, Matrix.zero(3)) == [Matrix.zero(3)] * 3


def test_lie3_general_polynomials():
    rng = random.Random(64)
    for _ in range(10):
        c1, c2 = rng.randint(-3, 3), rng.randint(-3, 3)
        if c1 == c2 == 0:
            continue
        w = rng.sample([(1, 2, 3), (2, 1, 3), (3, 1, 2), (1, 3, 2)], 2)
        f = lie_expand(w[0]).scale(c1) + lie_expand(w[1]).scale(c2)
        if f.is_zero():
            continue
        a = trace_zero(rng, 3)
        assert evaluate(f, lie3_witness_for(f, a), 3) == a
    with pytest.raises(InvalidInputError):
        lie3_witness_for(NcPoly.zero(), E(2, 0, 1))


# -- degree 4


def test_lie4_basis():
    assert lie4_basis_is_independent()
    assert len(LIE4_BASIS) == 6


def test_lie4_single_monomial_routes_through_x1_x3_x4():
    cert = lie4_analyze(LiePoly4.from_alphas((0,) * 5))
    assert cert.named["alpha4+alpha5"] == 0 and cert.named["alpha2+alpha3"] == 0
    assert cert.named["1+alpha1"] == 1
    route = cert.monomial_route
    assert route.label == "x1=x3=x4" and route.multiplier != 0
    args = lie4_witness(cert, E(3, 0, 1))
    assert evaluate(lie_expand((4, 3, 2, 1)), args, 3) == E(3, 0, 1)


def _double_form():
    return lie_expand((4, 3, 2, 1)) - lie_expand((3, 4, 2, 1)) + lie_expand((4, 2, 3, 1)) - lie_expand((2, 4, 3, 1))


def test_lie4_double_commutator_form():
    lp = LiePoly4.from_alphas((-1, 1, -1, 0, 0))
    x = [NcPoly.var(i) for i in range(1, 5)]
    # [[x4,x3],x2,x1] + alpha2 [[x4,x2],x3,x1] with alpha2 = 1
    rewrite = commutator(commutator(x[3], x[2]), commutator(x[1], x[0])) + commutator(
        commutator(x[3], x[1]), commutator(x[2], x[0])
    )
    assert lp.poly() == rewrite == _double_form()
    cert = lie4_analyze(lp)
    assert cert.monomial_route is None
    route = cert.double_route
    assert route.roles == ("b", "s", "s", "c") and route.multiplier == 2
    # f(x, y, y, z) = (1 + alpha2) [[z, y], [y, x]]
    b, s, c = NcPoly.var(1), NcPoly.var(2), NcPoly.var(3)
    sub = substitute(lp.poly(), {1: b, 2: s, 3: s, 4: c})
    assert sub == commutator(commutator(c, s), commutator(s, b)).scale(2)


def test_unit_matrix_witness_identity():
    # (1 + alpha2) e12 = f(e21, e12, e12, -1/2 e11)
    f = _double_form()
    for n in (2, 3):
        args = [E(n, 1, 0), E(n, 0, 1), E(n, 0, 1), E(n, 0, 0) * Fraction(-1, 2)]
        assert evaluate(f, args, n) == E(n, 0, 1) * 2


def test_lie4_double_route_targets():
    f = _double_form()
    for target in (Matrix.diag([1, -1, 0]), E(3, 0, 1), E(3, 0, 2) + E(3, 1, 2)):
        args = lie4_witness(f, target, B)
        assert evaluate(f, args, 3) == target


def test_lie4_certificates_self_verify():
    rng = random.Random(65)
    for _ in range(10):
        alphas = tuple(rng.randint(-3, 3) for _ in range(5))
        cert = lie4_analyze(LiePoly4.from_alphas(alphas))
        g = cert.poly.poly()
        for r in cert.routes:
            if not r.verified:
                continue
            roles = {"s": NcPoly.var(1), "x": NcPoly.var(2), "b": NcPoly.var(2), "c": NcPoly.var(3)}
            sub = substitute(g, {v + 1: roles[k] for v, k in enumerate(r.roles)})
            if r.kind == "monomial":
                base = lie_expand((1, 1, 1, 2))
            else:
                base = commutator(commutator(NcPoly.var(3), NcPoly.var(1)), commutator(NcPoly.var(1), NcPoly.var(2)))
            assert sub == base.scale(r.multiplier)


def test_lie4_general_polynomial_with_relabel():
    rng = random.Random(66)
    f = lie_expand((2, 4, 3, 1)).scale(3) - lie_expand((3, 2, 4, 1))
    lp = LiePoly4.from_poly(f)
    assert lp.relabel
    for _ in range(5):
        a = trace_zero(rng, 3)
        assert evaluate(f, lie4_witness(f, a, B), 3) == a


def test_lie4_alpha_sweep_never_alarms():
    """Every alpha in {-2..2}^5 has a route; the alarm would raise TheoryViolation."""
    for alphas in itertools.product(range(-2, 3), repeat=5):
        cert = lie4_analyze(LiePoly4.from_alphas(alphas))
        assert cert.monomial_route or cert.double_route


def test_lie4_degenerate_family_witnesses():
    """alpha1 = -1, alpha3 = -alpha2, alpha5 = -alpha4: every collapse coefficient vanishes."""
    rng = random.Random(67)
    for a2, a4 in itertools.product((-3, -1, 0, 1, 2), (-2, 0, 1)):
        lp = LiePoly4.from_alphas((-1, a2, -a2, a4, -a4))
        cert = lie4_analyze(lp)
        assert cert.monomial_route is None
        f = lp.poly()
        for target in (trace_zero(rng, 3), E(3, 1, 2)):
            assert evaluate(f, lie4_witness(cert, target, B), 3) == target


def test_zero_diag_commutator_examples():
    a = E(3, 0, 1) - E(3, 1, 0)
    res = zero_diag_commutator(a, B)
    assert res.check(a)
    t = res.t
    assert res.b @ res.c - res.c @ res.b == t @ a @ t.inverse()
    z = zero_diag_commutator(Matrix.zero(3), B)
    assert z.b.is_zero() and z.c.is_zero()
    with pytest.raises(PreconditionError):
        zero_diag_commutator(E(3, 0, 1), B)


def test_zero_diag_commutator_batch():
    rng = random.Random(68)
    ok = tried = 0
    while tried < 20:
        n = rng.randint(2, 4)
        a = Matrix(n, [0 if i == j else rng.randint(-9, 9) for i in range(n) for j in range(n)])
        if a.rank() < 2:
            continue
        tried += 1
        try:
            res = zero_diag_commutator(a, B)
        except WitnessNotFound:
            continue
        assert res.check(a)
        ok += 1
    print(f"zero_diag_commutator success rate {ok}/{tried}")
    assert ok == tried


def test_two_by_two_irrational_eigenvalues():
    a = Matrix.from_rows([[0, 1], [3, 0]])  # eigenvalues +-sqrt(3)
    res = zero_diag_commutator(a, B)
    assert res.method == "diagonalization" and res.check(a)
    f = _double_form()
    assert evaluate(f, lie4_witness(f, a, B), 2) == a


def test_lie_witness_dispatch():
    rng = random.Random(69)
    a = trace_zero(rng, 3)
    for f in (lie_expand((2, 1)).scale(3), lie3_poly(2), _double_form()):
        assert evaluate(f, lie_witness(f, a, B), 3) == a
    with pytest.raises(InvalidInputError):
        lie_witness(lie_expand((5, 4, 3, 2, 1)), a, B)


# -- obstruction


def test_obstruction_examples():
    c = commutator(NcPoly.var(1), NcPoly.var(2))
    u, v = E(2, 0, 0), E(2, 0, 1) + E(2, 1, 0)
    assert (evaluate(c, [u, v]) ** 2).trace() == -2
    rep = sum_commutators_obstruction(c, 2, 2, B)
    assert rep.verdict == "not_sum_of_commutators"
    n, args, tr = rep.witness
    assert tr == (evaluate(c, args, n) ** 2).trace() != 0
    assert rep.collapse_nonzero and rep.razmyslov_nonzero

    rep = sum_commutators_obstruction(NcPoly.var(1), 2, 2, B)
    assert rep.witness[0] == 1


def test_collapse_polynomial():
    x1, x2 = NcPoly.var(1), NcPoly.var(2)
    cp = collapse_polynomial(commutator(x1, x2))
    # f = x1 x2 - x2 x1: (f_1, g_1) = (1, x2), (f_2, g_2) = (x2, 1) with signs +, -
    want = NcPoly.monomial((2, 1, 2)) - NcPoly.monomial((2, 2, 1)) - NcPoly.monomial((1, 2, 2)) + NcPoly.monomial((2, 1, 2))
    assert cp == want and not cp.is_zero()
    with pytest.raises(Exception):
        collapse_polynomial(x1 * x1)
    with pytest.raises(InvalidInputError):
        sum_commutators_obstruction(x1, 1)
