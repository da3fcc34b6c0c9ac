import itertools
import random
from fractions import Fraction

import pytest

from ncimage.errors import DimensionMismatchError, InvalidInputError
from ncimage.evaluator import (
    CommPoly,
    DualMatrix,
    TracePolyRep,
    elementary_symmetric,
    eval_trace_power_jacobian,
    evaluate,
    evaluate_dual,
    grid_tensor,
    newton_coeffs_to_traces,
    newton_traces_to_coeffs,
    power_sum,
    sym_to_trace,
    trace_tuple,
    unit_grid,
)
from ncimage.exactmat import Matrix, char_poly, wj_matrix
from ncimage.freealg import NcPoly, commutator, standard_poly

x1, x2, x3 = (NcPoly.var(i) for i in range(1, 4))
E = Matrix.unit


def rand(rng, n, bound=20):
    return Matrix.random(n, rng, bound)


# -- eval


def test_eval_examples():
    c = commutator(x1, x2)
    assert evaluate(c, [E(2, 0, 0), E(2, 0, 1)]) == E(2, 0, 1)
    assert evaluate(c * c, [E(2, 0, 0), E(2, 0, 1) + E(2, 1, 0)]) == Matrix.scalar(2, -1)


def test_st4_vanishes_on_all_unit_tuples():
    st4 = standard_poly(4)
    units = [E(2, i, j) for i in range(2) for j in range(2)]
    for tup in itertools.product(units, repeat=4):
        assert evaluate(st4, list(tup)).is_zero()


def test_eval_errors():
    with pytest.raises(InvalidInputError):
        evaluate(x1 * x2, [Matrix.identity(2)])
    with pytest.raises(DimensionMismatchError):
        evaluate(x1 * x2, [Matrix.identity(2), Matrix.identity(3)])


def test_eval_is_a_homomorphism():
    rng = random.Random(21)
    f = x1 * x2 - x3.scale(Fraction(1, 2)) + x2 * x2
    g = commutator(x1, x3) + 4
    for _ in range(10):
        args = [rand(rng, 3) for _ in range(3)]
        F, G = evaluate(f, args), evaluate(g, args)
        assert evaluate(f * g, args) == F @ G
        assert evaluate(f + g, args) == F + G


def test_unit_grid_matches_direct_evaluation():
    f = commutator(x1, x2) * x3 + x3.scale(2) * x1 * x2
    grid = unit_grid(f, 2)
    for key in itertools.product([(i, j) for i in range(2) for j in range(2)], repeat=3):
        v = evaluate(f, [E(2, *k) for k in key])
        cell = grid.get(key, {})
        assert {(r, c): v[r, c] for r in range(2) for c in range(2) if v[r, c] != 0} == cell


def test_grid_tensor_matches_direct_evaluation():
    f = x1 * x3 * x2 - x2 * x3 * x3 * x1
    A = Matrix.from_rows([[1, 2], [3, -1]])
    T = grid_tensor(f, 2, (1, 2), {3: A})
    for u1, v1, u2, v2 in itertools.product(range(2), repeat=4):
        v = evaluate(f, [E(2, u1, v1), E(2, u2, v2), A])
        for r in range(2):
            for c in range(2):
                assert T[r, u1, v1, u2, v2, c] == v[r, c]


# -- trace tuples and Newton


def test_trace_tuple_examples():
    assert trace_tuple(Matrix.diag([1, -1]), 2) == (0, 2)
    assert trace_tuple(E(2, 0, 1), 2) == (0, 0)
    assert trace_tuple(wj_matrix(3, 3), 3) == (0, 0, 3)


def test_trace_tuple_conjugation_invariant():
    rng = random.Random(22)
    a = rand(rng, 3)
    t = Matrix.from_rows([[1, 2, 0], [0, 1, 3], [1, 0, 1]])
    assert trace_tuple(t @ a @ t.inverse()) == trace_tuple(a)
    assert trace_tuple(a * 3) == tuple(3**k * v for k, v in enumerate(trace_tuple(a), 1))


def test_newton_examples():
    t1, t2 = Fraction(3), Fraction(5)
    assert newton_traces_to_coeffs((t1, t2)) == (-t1, (t1**2 - t2) / 2)
    assert newton_traces_to_coeffs((0, 0, 0)) == (0, 0, 0)


def test_newton_roundtrip_random_matrices():
    rng = random.Random(23)
    for _ in range(100):
        n = rng.randint(1, 5)
        a = rand(rng, n)
        t = trace_tuple(a)
        assert newton_traces_to_coeffs(t) == char_poly(a)
        assert newton_coeffs_to_traces(char_poly(a)) == t


def test_newton_inverse_on_random_tuples():
    rng = random.Random(24)
    for _ in range(200):
        n = rng.randint(1, 6)
        t = tuple(Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for _ in range(n))
        assert newton_coeffs_to_traces(newton_traces_to_coeffs(t)) == t


# -- symmetric functions


def z(n, k):
    return CommPoly.var(n + 1, k)


def test_sym_to_trace_examples():
    n = 3
    q = sym_to_trace(power_sum(n, 1))
    assert q.P == z(n, 1) and q.pure
    q = sym_to_trace(elementary_symmetric(2, 2))
    assert q.P == (z(2, 1) * z(2, 1) - z(2, 2)) * Fraction(1, 2)
    l1, l2 = CommPoly.var(2, 0), CommPoly.var(2, 1)
    disc = (l1 - l2) * (l1 - l2)
    q = sym_to_trace(disc)
    assert q.P == z(2, 2) * 2 - z(2, 1) * z(2, 1)


def test_sym_to_trace_on_diagonal_matrices():
    rng = random.Random(25)
    l1, l2 = CommPoly.var(2, 0), CommPoly.var(2, 1)
    disc = (l1 - l2) * (l1 - l2)
    q = sym_to_trace(disc)
    for _ in range(100):
        d = [rng.randint(-30, 30), rng.randint(-30, 30)]
        assert q.scalar(Matrix.diag(d)) == disc(d)
    ls = [CommPoly.var(3, i) for i in range(3)]
    p = ls[0] * ls[1] * ls[2] + ls[0] ** 3 + ls[1] ** 3 + ls[2] ** 3
    q = sym_to_trace(p)
    for _ in range(30):
        d = [rng.randint(-9, 9) for _ in range(3)]
        assert q.scalar(Matrix.diag(d)) == p(d)


def test_sym_to_trace_rejects_nonsymmetric():
    with pytest.raises(InvalidInputError):
        sym_to_trace(CommPoly.var(2, 0))


def test_trace_poly_rep_flags():
    rep = TracePolyRep.from_terms(2, {(1, 1, 0): 1, (0, 0, 1): 2})  # tr(X) X + 2 tr(X^2)
    assert not rep.pure
    X = Matrix.from_rows([[1, 2], [0, 3]])
    assert rep.evaluate(X) == X * 4 + Matrix.scalar(2, 2 * (X @ X).trace())
    with pytest.raises(InvalidInputError):
        TracePolyRep.from_terms(2, {(0, 0, 0): 1})


# -- dual numbers and Jacobians


def test_dual_numbers():
    a = DualMatrix(Matrix.from_rows([[1, 2], [3, 4]]), Matrix.identity(2))
    sq = a @ a
    assert sq.value == a.value @ a.value
    assert sq.deriv == a.value + a.value
    vt, dt = sq.trace()
    assert vt == (a.value @ a.value).trace() and dt == 2 * a.value.trace()


def test_jacobian_examples():
    a = Matrix.from_rows([[1, 2], [3, 5]])
    assert eval_trace_power_jacobian(x1, [a], {1}) == [[1, 0, 0, 1]]
    J = eval_trace_power_jacobian(x1, [a], {2})
    assert J == [list((a.transpose() * 2).e)]


def _interp_linear_coeff(values, hs):
    """Coefficient of h in the interpolating polynomial (Lagrange, exact)."""
    total = Fraction(0)
    for i, (hi, vi) in enumerate(zip(hs, values)):
        others = [h for j, h in enumerate(hs) if j != i]
        denom = Fraction(1)
        for h in others:
            denom *= hi - h
        # derivative at 0 of prod (h - h_j) = sum_k prod_{j != k} (-h_j)
        d0 = Fraction(0)
        for k in range(len(others)):
            p = Fraction(1)
            for j, h in enumerate(others):
                if j != k:
                    p *= -h
            d0 += p
        total += vi * d0 / denom
    return total


def test_jacobian_matches_polynomial_finite_difference():
    rng = random.Random(26)
    f = commutator(x1, x2)
    point = [rand(rng, 2, 9), rand(rng, 2, 9)]
    J = eval_trace_power_jacobian(f, point, {2})
    # tr(f(p + h e)^2) has degree <= 4 in h; five exact samples pin it down
    hs = [Fraction(k, 3) for k in range(-2, 3)]
    col = 0
    for m in range(2):
        for p in range(2):
            for q in range(2):
                vals = []
                for h in hs:
                    args = list(point)
                    args[m] = args[m] + E(2, p, q) * h
                    v = evaluate(f, args)
                    vals.append((v @ v).trace())
                assert J[0][col] == _interp_linear_coeff(vals, hs)
                col += 1


def test_jacobian_is_dual_extraction_and_linear():
    rng = random.Random(27)
    f = x1 * x2 * x1 + x2
    point = [rand(rng, 2, 9), rand(rng, 2, 9)]
    J = eval_trace_power_jacobian(f, point, {1, 2})
    d1, d2 = rand(rng, 2, 5), rand(rng, 2, 5)
    F = evaluate_dual(f, [DualMatrix(point[0], d1), DualMatrix(point[1], d2)])
    direction = list(d1.e) + list(d2.e)
    predicted = [sum(a * b for a, b in zip(row, direction)) for row in J]
    assert predicted[0] == F.deriv.trace()
    assert predicted[1] == (F @ F).deriv.trace()
