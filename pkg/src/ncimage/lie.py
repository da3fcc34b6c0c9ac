"""Exact surjectivity witnesses for multilinear Lie polynomials of degree <= 4.

Every witness returned here is checked by exact evaluation before it is
handed back.  Conjugations are tracked explicitly so that a witness found
for a conjugate of the target is mapped back to the target itself.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .analyzer import Budget, make_report, random_tuple
from .errors import InvalidInputError, NotLinearError, PreconditionError, TheoryViolation, WitnessNotFound
from .evaluator import evaluate
from .exactmat import (
    Matrix,
    bareiss,
    irreducible_factors,
    is_diagonalizable,
    nullspace,
    shoda_zero_diagonal,
    solve_linear,
)
from .freealg import NcPoly, commutator, lie_expand, razmyslov_transform, rename, substitute
from .scalars import div, format_scalar, quadratic_sqrt


def _check_target(target):
    if not isinstance(target, Matrix):
        raise InvalidInputError("target must be a Matrix")
    if target.trace() != 0:
        raise PreconditionError("a Lie polynomial only takes trace-zero values")


def _distinct_diag(n):
    return Matrix.diag(list(range(1, n + 1)))


# -- monomials [s, ..., s, x] -----------------------------------------------------------------


def monomial_witness(k, target):
    """(x, s) with [s, [s, ..., [s, x]]] (k-1 copies of s) equal to target."""
    if k < 2:
        raise InvalidInputError("a Lie monomial of this kind needs degree >= 2")
    _check_target(target)
    n = target.n
    if target.is_zero():
        return Matrix.zero(n), Matrix.zero(n)
    t = shoda_zero_diagonal(target)
    t_inv = t.inverse()
    tz = t @ target @ t_inv
    lam = list(range(1, n + 1))
    s = Matrix.diag(lam)
    x = Matrix(n, [0 if i == j else div(tz[i, j], (lam[i] - lam[j]) ** (k - 1)) for i in range(n) for j in range(n)])
    x, s = t_inv @ x @ t, t_inv @ s @ t
    if _ad_power(s, x, k - 1) != target:
        raise TheoryViolation("monomial witness failed exact verification")
    return x, s


def _ad_power(s, x, m):
    for _ in range(m):
        x = s @ x - x @ s
    return x


def monomial_args(word, target):
    """Arguments for [x_{i1}, ..., x_{i_{k-1}}, x_j] (j innermost, i's != j): every outer slot gets s."""
    word = tuple(word)
    if len(word) < 2 or word[-1] in word[:-1]:
        raise InvalidInputError("the innermost variable must not repeat in the outer slots")
    x, s = monomial_witness(len(word), target)
    args = {v: s for v in word[:-1]}
    args[word[-1]] = x
    return args


# -- coordinates in a Lie basis -----------------------------------------------------------------


def _coords(f, basis):
    """Exact coordinates of f on the expansions of ``basis`` (right-normed words)."""
    polys = [lie_expand(w) for w in basis]
    words = sorted({w for p in polys for w in p.terms} | set(f.terms))
    rows = [[p.coeff(w) for p in polys] for w in words]
    rhs = [f.coeff(w) for w in words]
    sol = solve_linear(rows, rhs)
    if sol is None:
        raise InvalidInputError("polynomial is not a multilinear Lie polynomial in the expected variables")
    return sol


def _as_poly(f):
    if isinstance(f, NcPoly):
        return f
    raise InvalidInputError("expected an NcPoly")


def _check_shape(f, d):
    if f.is_zero():
        raise InvalidInputError("the zero polynomial has image {0}")
    if f.variables != tuple(range(1, d + 1)) or not f.is_multilinear() or f.degree != d:
        raise InvalidInputError(f"expected a multilinear polynomial of degree {d} in x1..x{d}")


def _map_back(args_g, tau, d):
    """Witness for g = rename(f, tau) -> witness for f: B_v = A_{tau(v)}."""
    return [args_g[tau.get(v, v)] for v in range(1, d + 1)]


# -- degree 3 ------------------------------------------------------------------------------------

LIE3_BASIS = ((3, 2, 1), (2, 3, 1))


def lie3_poly(alpha):
    return lie_expand((3, 2, 1)) + lie_expand((2, 3, 1)).scale(alpha)


@dataclass(frozen=True)
class Lie3Normal:
    alpha: object
    scale: object
    relabel: dict


def normalize_lie3(f):
    """f = scale * rename^-1 of ([x3,x2,x1] + alpha [x2,x3,x1])."""
    f = _as_poly(f)
    _check_shape(f, 3)
    c1, c2 = _coords(f, LIE3_BASIS)
    if c1 != 0:
        tau, scale, alpha = {}, c1, div(c2, c1)
    else:
        tau, scale, alpha = {2: 3, 3: 2}, c2, 0
    g = rename(f, tau)
    if g != lie3_poly(alpha).scale(scale):
        raise TheoryViolation("degree-3 normalization does not reproduce the polynomial")
    return Lie3Normal(alpha, scale, tau)


def lie3_witness(alpha, target):
    """Arguments (x1, x2, x3) with [x3,x2,x1] + alpha [x2,x3,x1] = target; uses x1 = x3."""
    _check_target(target)
    n = target.n
    if target.is_zero():
        return [Matrix.zero(n)] * 3
    # f(x, y, x) = [x, y, x] = -[x, x, y]
    y, s = monomial_witness(3, -target)
    args = [s, y, s]
    if evaluate(lie3_poly(alpha), args, n) != target:
        raise TheoryViolation("degree-3 witness failed exact verification")
    return args


def lie3_witness_for(f, target):
    norm = normalize_lie3(f)
    args_g = lie3_witness(norm.alpha, target / norm.scale)
    args = _map_back({i + 1: a for i, a in enumerate(args_g)}, norm.relabel, 3)
    if evaluate(f, args, target.n) != target:
        raise TheoryViolation("mapped degree-3 witness failed exact verification")
    return args


# -- degree 4 ------------------------------------------------------------------------------------

LIE4_BASIS = ((4, 3, 2, 1), (3, 4, 2, 1), (4, 2, 3, 1), (2, 4, 3, 1), (3, 2, 4, 1), (2, 3, 4, 1))


def lie4_basis_is_independent():
    polys = [lie_expand(w) for w in LIE4_BASIS]
    words = sorted({w for p in polys for w in p.terms})
    return bareiss([[p.coeff(w) for w in words] for p in polys])[0] == len(LIE4_BASIS)


@dataclass(frozen=True)
class LiePoly4:
    """[x4,x3,x2,x1] + alpha_1 [x3,x4,x2,x1] + ... + alpha_5 [x2,x3,x4,x1] up to scale and relabeling.

    ``original`` is scale * (normal form) after the relabeling is undone.
    """

    alphas: tuple
    scale: object = 1
    relabel: dict = field(default_factory=dict)
    original: NcPoly = None

    @property
    def coefficients(self):
        return (1,) + tuple(self.alphas)

    def poly(self):
        out = NcPoly.zero()
        for c, w in zip(self.coefficients, LIE4_BASIS):
            out = out + lie_expand(w).scale(c)
        return out

    @classmethod
    def from_alphas(cls, alphas):
        alphas = tuple(alphas)
        if len(alphas) != 5:
            raise InvalidInputError("need five alphas")
        p = cls(alphas)
        return cls(alphas, 1, {}, p.poly())

    @classmethod
    def from_poly(cls, f):
        f = _as_poly(f)
        _check_shape(f, 4)
        coords = _coords(f, LIE4_BASIS)
        k = next(i for i, c in enumerate(coords) if c != 0)
        i, j, l, _ = LIE4_BASIS[k]
        tau = {} if k == 0 else {i: 4, j: 3, l: 2}
        g = rename(f, tau)
        gc = _coords(g, LIE4_BASIS)
        scale = gc[0]
        alphas = tuple(div(c, scale) for c in gc[1:])
        out = cls(alphas, scale, tau, f)
        if g != out.poly().scale(scale):
            raise TheoryViolation("degree-4 normalization does not reproduce the polynomial")
        return out

    def to_dict(self):
        return {
            "alphas": [format_scalar(a) for a in self.alphas],
            "scale": format_scalar(self.scale),
            "relabel": {str(k): v for k, v in sorted(self.relabel.items())},
        }


@dataclass
class Route:
    kind: str  # "monomial" or "double_commutator"
    roles: tuple  # role of x1..x4: "s", "x" / "s", "b", "c"
    multiplier: object
    verified: bool
    label: str = ""

    @property
    def usable(self):
        return self.verified and self.multiplier != 0

    def to_dict(self):
        return {
            "kind": self.kind,
            "roles": list(self.roles),
            "multiplier": format_scalar(self.multiplier),
            "verified": self.verified,
            "label": self.label,
        }


@dataclass
class Lie4Certificate:
    poly: LiePoly4
    routes: list
    named: dict

    @property
    def monomial_route(self):
        return next((r for r in self.routes if r.kind == "monomial" and r.usable), None)

    @property
    def double_route(self):
        return next((r for r in self.routes if r.kind == "double_commutator" and r.usable), None)

    @property
    def coverage(self):
        if self.monomial_route:
            return "all trace-zero targets (monomial reduction)"
        if self.double_route:
            return "rank >= 2 via zero-diagonal commutators; rank 1 via the unit-matrix witness"
        return "none"

    def to_dict(self):
        return {
            "normal_form": self.poly.to_dict(),
            "named_multipliers": {k: format_scalar(v) for k, v in self.named.items()},
            "routes": [r.to_dict() for r in self.routes],
            "primary": (self.monomial_route or self.double_route).to_dict() if self.routes else None,
            "coverage": self.coverage,
        }


_S, _X, _B, _C = (NcPoly.var(i) for i in (1, 2, 2, 3))
_MONO = lie_expand((1, 1, 1, 2))  # [s, s, s, x]
_DOUBLE = commutator(commutator(NcPoly.var(3), NcPoly.var(1)), commutator(NcPoly.var(1), NcPoly.var(2)))  # [[c,s],[s,b]]

# positions replaced in the order the collapse argument treats them
_MONO_PATTERNS = (
    (("s", "s", "s", "x"), "x1=x2=x3"),
    (("s", "s", "x", "s"), "x1=x2=x4"),
    (("s", "x", "s", "s"), "x1=x3=x4"),
    (("x", "s", "s", "s"), "x2=x3=x4"),
)


def _double_patterns():
    out = []
    # x1 = b, x2 = x3 = s, x4 = c first: the (1 + alpha_2) route
    first = ("b", "s", "s", "c")
    out.append(first)
    for i in range(4):
        for j in range(i + 1, 4):
            rest = [p for p in range(4) if p not in (i, j)]
            for bpos, cpos in (rest, rest[::-1]):
                roles = [None] * 4
                roles[i] = roles[j] = "s"
                roles[bpos], roles[cpos] = "b", "c"
                if tuple(roles) != first:
                    out.append(tuple(roles))
    return out


_ROLE_VAR = {"s": NcPoly.var(1), "x": NcPoly.var(2), "b": NcPoly.var(2), "c": NcPoly.var(3)}


def _multiple_of(p, base):
    """m with p = m * base (exact), or None."""
    if p.is_zero():
        return 0
    w, c = next(iter(base.items()))
    m = div(p.coeff(w), c)
    return m if p == base.scale(m) else None


def lie4_analyze(f):
    """Reduction certificate: collapse substitutions and double-commutator substitutions."""
    lp = f if isinstance(f, LiePoly4) else LiePoly4.from_poly(f)
    g = lp.poly()
    routes = []
    for roles, label in _MONO_PATTERNS:
        sub = substitute(g, {v + 1: _ROLE_VAR[r] for v, r in enumerate(roles)})
        m = _multiple_of(sub, _MONO)
        routes.append(Route("monomial", roles, m if m is not None else 0, m is not None, label))
    for roles in _double_patterns():
        sub = substitute(g, {v + 1: _ROLE_VAR[r] for v, r in enumerate(roles)})
        m = _multiple_of(sub, _DOUBLE)
        label = "x2=x3" if roles == ("b", "s", "s", "c") else ""
        routes.append(Route("double_commutator", roles, m if m is not None else 0, m is not None, label))
    a1, a2, a3, a4, a5 = lp.alphas
    named = {"alpha4+alpha5": a4 + a5, "alpha2+alpha3": a2 + a3, "1+alpha1": 1 + a1}
    if all(v == 0 for v in named.values()):
        named["1+alpha2"] = 1 + a2
        named["1-alpha2"] = 1 - a2
    cert = Lie4Certificate(lp, routes, named)
    if cert.monomial_route is None and cert.double_route is None:
        raise TheoryViolation("no witness route for a nonzero degree-4 Lie polynomial")
    return cert


# -- zero-diagonal commutators ---------------------------------------------------------------------


@dataclass
class ZeroDiagCommutator:
    """Zero-diagonal b, c with [b, c] = t a t^-1 (t = identity for a direct solve)."""

    b: Matrix
    c: Matrix
    t: Matrix
    method: str

    def check(self, a):
        t = self.t
        ok_diag = all(self.b[i, i] == 0 and self.c[i, i] == 0 for i in range(a.n))
        return ok_diag and self.b @ self.c - self.c @ self.b == t @ a @ t.inverse()


def _offdiag(n):
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def _solve_c(b, a):
    """Zero-diagonal c with [b, c] = a, or None."""
    n = a.n
    off = _offdiag(n)
    rows = [[0] * len(off) for _ in range(n * n)]
    for col, (i, j) in enumerate(off):
        # [b, e_ij] = b e_ij - e_ij b
        for r in range(n):
            if b[r, i] != 0:
                rows[r * n + j][col] += b[r, i]
        for q in range(n):
            if b[j, q] != 0:
                rows[i * n + q][col] -= b[j, q]
    sol = solve_linear(rows, list(a.e))
    if sol is None:
        return None
    c = Matrix.zero(n)
    for v, (i, j) in zip(sol, off):
        c = c + Matrix.unit(n, i, j) * v
    return c


def _companion_family(n):
    """Basis of the trace-zero companion shapes: subdiagonal ones, and e_{i,n-1} for i < n-1."""
    L = np.zeros((n, n))
    for i in range(1, n):
        L[i, i - 1] = 1
    vecs = [L.ravel()]
    for i in range(n - 1):
        E = np.zeros((n, n))
        E[i, n - 1] = 1
        vecs.append(E.ravel())
    return np.array(vecs).T


_UNIVERSAL = {}


def universal_companion_b(n, seed=0, attempts=200000):
    """Sparse zero-diagonal B whose zero-diagonal commutator image contains every companion shape.

    Found by seeded random search (float rank as a filter), then confirmed exactly.
    """
    if n in _UNIVERSAL:
        return _UNIVERSAL[n]
    rng = random.Random(f"universal-b:{seed}:{n}")
    off = [(i, j) for i in range(n - 1) for j in range(n) if i != j]
    offall = _offdiag(n)
    T = _companion_family(n)
    eye = np.eye(n)
    for _ in range(attempts):
        B = np.zeros((n, n))
        for i, j in rng.sample(off, min(len(off), rng.choice([n, n + 1, n + 2]))):
            B[i, j] = rng.choice([1, -1])
        A = np.array([(B[:, [i]] @ eye[[j], :] - eye[:, [i]] @ B[[j], :]).ravel() for i, j in offall]).T
        r = np.linalg.matrix_rank(A)
        if np.linalg.matrix_rank(np.hstack([A, T])) != r:
            continue
        Bm = Matrix.from_rows([[int(v) for v in row] for row in B])
        shapes = [Matrix(n, [int(v) for v in T[:, k]]) for k in range(T.shape[1])]
        if all(_solve_c(Bm, s) is not None for s in shapes):
            _UNIVERSAL[n] = Bm
            return Bm
    raise WitnessNotFound(f"no universal zero-diagonal B found for n={n}")


def cyclic_basis(a, rng=None, tries=20):
    """K = [v, a v, ..., a^(n-1) v] invertible, or None when a looks derogatory."""
    n = a.n
    cands = [[int(k == i) for k in range(n)] for i in range(n)]
    rng = rng or random.Random(0)
    cands += [[rng.randint(-3, 3) for _ in range(n)] for _ in range(tries)]
    for v in cands:
        cols = [v]
        for _ in range(n - 1):
            w = cols[-1]
            cols.append([sum(a[i, j] * w[j] for j in range(n)) for i in range(n)])
        K = Matrix(n, [cols[j][i] for i in range(n) for j in range(n)])
        if K.det() != 0:
            return K
    return None


def zero_diag_commutator(a, budget=Budget()):
    """Zero-diagonal b, c and invertible t with [b, c] = t a t^-1.

    Tries, in order: the direct solve for a itself (random zero-diagonal b),
    the companion form with a universal b (n >= 3), rational diagonalization (n = 2),
    and random conjugates of the Shoda form.
    """
    _check_target(a)
    n = a.n
    ident = Matrix.identity(n)
    if a.is_zero():
        z = Matrix.zero(n)
        return ZeroDiagCommutator(z, z, ident, "zero")
    if a.rank() < 2:
        raise PreconditionError("rank-one trace-zero matrices are not commutators of zero-diagonal matrices")
    rng = budget.rng("zero-diag")
    off = _offdiag(n)
    if all(a[i, i] == 0 for i in range(n)):
        for _ in range(budget.retries):
            b = Matrix.zero(n)
            for i, j in off:
                b = b + Matrix.unit(n, i, j) * rng.randint(-9, 9)
            c = _solve_c(b, a)
            if c is not None:
                return _checked(ZeroDiagCommutator(b, c, ident, "direct"), a)
    if n >= 3:
        K = cyclic_basis(a, rng)
        if K is not None:
            Ki = K.inverse()
            F = Ki @ a @ K
            B = universal_companion_b(n, budget.seed)
            c = _solve_c(B, F)
            if c is not None:
                return _checked(ZeroDiagCommutator(B, c, Ki, "companion"), a)
    diag = _rational_diagonalization(a)
    if diag is None and n == 2 and a.is_rational():
        diag = _quadratic_diagonalization(a)
    if diag is not None:
        P, d = diag
        # [S, T] = diag(t1, t2 - t1, ..., -t_{n-1}) for S the upper shift, T = sum t_i e_{i+1,i}
        S, T = Matrix.zero(n), Matrix.zero(n)
        acc = 0
        for i in range(n - 1):
            acc = acc + d[i]
            S = S + Matrix.unit(n, i, i + 1)
            T = T + Matrix.unit(n, i + 1, i) * acc
        return _checked(ZeroDiagCommutator(S, T, P.inverse(), "diagonalization"), a)
    if n == 2:
        raise WitnessNotFound("2x2 target has eigenvalues outside every cyclotomic field")
    z = shoda_zero_diagonal(a)
    for _ in range(budget.retries * 10):
        g = Matrix.random(n, rng, 3)
        if g.det() == 0:
            continue
        ag = g @ z @ a @ z.inverse() @ g.inverse()
        t2 = shoda_zero_diagonal(ag)
        t = t2 @ g @ z
        az = t @ a @ t.inverse()
        b = Matrix.zero(n)
        for i, j in off:
            b = b + Matrix.unit(n, i, j) * rng.randint(-9, 9)
        c = _solve_c(b, az)
        if c is not None:
            return _checked(ZeroDiagCommutator(b, c, t, "conjugated"), a)
    raise WitnessNotFound("no zero-diagonal commutator found within the retry budget")


def _rational_diagonalization(a):
    """(P, eigenvalues) with P^-1 a P diagonal, when a is diagonalizable over the rationals."""
    n = a.n
    if not a.is_rational() or not is_diagonalizable(a):
        return None
    cols, vals = [], []
    for fac, _ in irreducible_factors(a):
        if len(fac) != 2:
            return None
        lam = div(-fac[1], fac[0])
        for v in nullspace([list(r) for r in (a - Matrix.scalar(n, lam)).rows()]):
            cols.append(v)
            vals.append(lam)
    P = Matrix(n, [cols[c][r] for r in range(n) for c in range(n)])
    return P, vals


def _quadratic_diagonalization(a):
    """2x2 trace-zero a with eigenvalues +-sqrt(-det a), diagonalized over a cyclotomic field."""
    lam = quadratic_sqrt(-a.det())
    p, q, r = a[0, 0], a[0, 1], a[1, 0]
    if q != 0:
        cols = [[q, lam - p], [q, -lam - p]]
    else:
        cols = [[lam + p, r], [-lam + p, r]]
    P = Matrix(2, [cols[0][0], cols[1][0], cols[0][1], cols[1][1]])
    return P, [lam, -lam]


def _checked(res, a):
    if not res.check(a):
        raise TheoryViolation("zero-diagonal commutator failed exact verification")
    return res


def _rank_one_conjugator(a):
    """P with P^-1 a P = e_12 for a rank-one trace-zero a."""
    n = a.n
    j = next(j for j in range(n) if any(a[i, j] != 0 for i in range(n)))
    p2 = [int(k == j) for k in range(n)]
    p1 = [a[i, j] for i in range(n)]
    ker = nullspace([list(r) for r in a.rows()])
    cols = [p1, p2]
    for v in ker:
        trial = cols + [v]
        if bareiss(trial)[0] == len(trial):
            cols = trial
        if len(cols) == n:
            break
    P = Matrix(n, [cols[c][r] for r in range(n) for c in range(n)])
    return P


def lie4_witness(f, target, budget=Budget()):
    """Arguments (x1..x4) with f(args) = target, following the certified route."""
    cert = f if isinstance(f, Lie4Certificate) else lie4_analyze(f)
    lp = cert.poly
    _check_target(target)
    n = target.n
    if target.is_zero():
        args = [Matrix.zero(n)] * 4
    else:
        g_target = target / lp.scale
        route = cert.monomial_route
        if route is not None:
            x, s = monomial_witness(4, g_target / route.multiplier)
            roles = {"s": s, "x": x}
        else:
            route = cert.double_route
            m = route.multiplier
            if g_target.rank() == 1:
                P = _rank_one_conjugator(g_target)
                Pi = P.inverse()
                e = lambda i, j: Matrix.unit(n, i, j)  # noqa: E731
                base = {"b": e(1, 0), "s": e(0, 1), "c": e(0, 0) * div(-1, 2 * m)}
                roles = {k: P @ v @ Pi for k, v in base.items()}
            else:
                zd = zero_diag_commutator(g_target, budget)
                s = _distinct_diag(n)
                lam = list(range(1, n + 1))
                # [c', s] = b and [s, b'] = c, so m [[c',s],[s,b']] = m [b, c]
                cp = Matrix(n, [0 if i == j else div(zd.b[i, j], m * (lam[j] - lam[i])) for i in range(n) for j in range(n)])
                bp = Matrix(n, [0 if i == j else div(zd.c[i, j], lam[i] - lam[j]) for i in range(n) for j in range(n)])
                t, ti = zd.t, zd.t.inverse()
                roles = {"s": ti @ s @ t, "b": ti @ bp @ t, "c": ti @ cp @ t}
        args_g = {v + 1: roles[r] for v, r in enumerate(route.roles)}
        args = _map_back(args_g, lp.relabel, 4)
    poly = lp.original if lp.original is not None else lp.poly()
    if evaluate(poly, args, n) != target:
        raise TheoryViolation("degree-4 witness failed exact verification")
    return args


# -- dispatch by degree ------------------------------------------------------------------------------


def lie_witness(f, target, budget=Budget()):
    """Witness for any nonzero multilinear Lie polynomial of degree 2, 3 or 4 in x1..xd."""
    f = _as_poly(f)
    _check_target(target)
    d = f.degree
    n = target.n
    if d == 1:
        raise InvalidInputError("degree-one polynomials are not Lie polynomials of interest")
    if d == 2:
        _check_shape(f, 2)
        c = _coords(f, ((2, 1),))[0]
        x, s = monomial_witness(2, target / c)
        args = [x, s]
    elif d == 3:
        args = lie3_witness_for(f, target)
    elif d == 4:
        args = lie4_witness(f, target, budget)
    else:
        raise InvalidInputError("witnesses are only constructed for degree <= 4")
    if evaluate(f, args, n) != target:
        raise TheoryViolation("Lie witness failed exact verification")
    return args


# -- sums of commutators ---------------------------------------------------------------------------


@dataclass
class ObstructionReport:
    k: int
    witness: object  # (n, args, trace) or None
    collapse_nonzero: object  # True/False, or None if f is not linear in x1
    razmyslov_nonzero: object
    collapse_terms: int = 0

    @property
    def verdict(self):
        if self.witness is not None:
            return "not_sum_of_commutators"
        return "inconclusive"

    def to_dict(self):
        w = None
        if self.witness is not None:
            n, args, tr = self.witness
            w = {"n": n, "args": [a.to_literal() for a in args], "trace": format_scalar(tr)}
        return {
            "verdict": self.verdict,
            "k": self.k,
            "witness": w,
            "collapse_nonzero": self.collapse_nonzero,
            "collapse_terms": self.collapse_terms,
            "razmyslov_nonzero": self.razmyslov_nonzero,
        }


def collapse_polynomial(f, v=1):
    """sum_{i,j} g_i f_j x_v g_j f_i for f = sum f_i x_v g_i."""
    parts = []
    for w, c in f.items():
        if w.count(v) != 1:
            raise NotLinearError(f"term {w} is not linear in x{v}")
        k = w.index(v)
        parts.append((c, w[:k], w[k + 1 :]))
    out = {}
    for ci, fi, gi in parts:
        for cj, fj, gj in parts:
            word = gi + fj + (v,) + gj + fi
            out[word] = out.get(word, 0) + ci * cj
    return NcPoly(out, f.field)


def sum_commutators_obstruction(f, k=2, nmax=3, budget=Budget()):
    """Search for tr(f(args)^k) != 0; a hit certifies that f^k is not a sum of commutators."""
    if k < 2:
        raise InvalidInputError("need k >= 2")
    f = _as_poly(f)
    rng = budget.rng("obstruction")
    d = max(f.variables, default=0)
    witness = None
    for n in range(1, nmax + 1):
        for _ in range(budget.trials):
            args = random_tuple(rng, n, d, min(budget.bound, 9))
            tr = (evaluate(f, args, n) ** k).trace()
            if tr != 0:
                witness = (n, args, tr)
                break
        if witness:
            break
    collapse = raz = None
    terms = 0
    if f.variables and f.degree_in(1) == 1 and all(w.count(1) == 1 for w in f.terms):
        cp = collapse_polynomial(f, 1)
        collapse = not cp.is_zero()
        terms = len(cp)
        raz = not razmyslov_transform(f, 1).is_zero()
    return ObstructionReport(k, witness, collapse, raz, terms)


def obstruction_report(f, k, nmax, budget):
    rep = sum_commutators_obstruction(f, k, nmax, budget)
    witnesses = [rep.to_dict()["witness"]] if rep.witness else []
    return make_report("obstruction", [str(f), k, nmax], budget, rep.verdict, witnesses, {}, detail=rep.to_dict())
