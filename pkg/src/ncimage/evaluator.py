"""Evaluating noncommutative polynomials on matrices, and trace machinery.

Covers word evaluation with shared prefix products, trace tuples, Newton's
identities in both directions, symmetric polynomials rewritten through
traces of powers, forward-mode (dual number) Jacobians of tr(f^k), and the
matrix-unit grid used for exact decisions on multilinear input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatchError, InvalidInputError
from .exactmat import Matrix
from .scalars import as_scalar, div


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


# -- evaluation ---------------------------------------------------------------


def _lookup_table(f, args):
    vs = f.variables
    if isinstance(args, dict):
        table = dict(args)
    else:
        table = {i + 1: a for i, a in enumerate(args)}
    missing = [v for v in vs if v not in table]
    if missing:
        raise InvalidInputError(f"no argument supplied for variables {missing}")
    return table


def evaluate(f, args, n=None):
    """f(a_1, ..., a_d) for a sequence (or {index: matrix} dict) of matrices."""
    table = _lookup_table(f, args)
    dims = {a.n for a in table.values()}
    if len(dims) > 1:
        raise DimensionMismatchError(f"arguments of different sizes: {sorted(dims)}")
    if n is None:
        if not dims:
            raise InvalidInputError("dimension unknown: pass n for constant polynomials")
        n = dims.pop()
    return _eval_words(f, table, Matrix.identity(n), Matrix.zero(n))


def _eval_words(f, table, one, zero):
    total = zero
    stack = [one]  # stack[k] = product of the first k letters of the previous word
    prev = ()
    for w, c in f.items():
        k = 0
        lim = min(len(prev), len(w))
        while k < lim and prev[k] == w[k]:
            k += 1
        del stack[k + 1 :]
        for letter in w[k:]:
            stack.append(stack[-1] @ table[letter])
        total = total + stack[-1] * c
        prev = w
    return total


eval_poly = evaluate


class DualMatrix:
    """value + eps * deriv with eps^2 = 0."""

    __slots__ = ("value", "deriv")

    def __init__(self, value, deriv):
        self.value = value
        self.deriv = deriv

    def __add__(self, other):
        return DualMatrix(self.value + other.value, self.deriv + other.deriv)

    def __sub__(self, other):
        return DualMatrix(self.value - other.value, self.deriv - other.deriv)

    def __matmul__(self, other):
        return DualMatrix(
            self.value @ other.value,
            self.deriv @ other.value + self.value @ other.deriv,
        )

    def __mul__(self, c):
        return DualMatrix(self.value * c, self.deriv * c)

    __rmul__ = __mul__

    def trace(self):
        return self.value.trace(), self.deriv.trace()

    @classmethod
    def const(cls, a):
        return cls(a, Matrix.zero(a.n))

    def __eq__(self, other):
        return isinstance(other, DualMatrix) and self.value == other.value and self.deriv == other.deriv

    def __repr__(self):
        return f"DualMatrix({self.value!r}, {self.deriv!r})"


def evaluate_dual(f, args):
    """Evaluate f over dual matrices (all arguments must be DualMatrix)."""
    table = _lookup_table(f, args)
    n = next(iter(table.values())).value.n
    one = DualMatrix.const(Matrix.identity(n))
    zero = DualMatrix.const(Matrix.zero(n))
    return _eval_words(f, table, one, zero)


# -- traces and Newton ----------------------------------------------------------


def trace_tuple(a, upto=None):
    """(tr a, tr a^2, ..., tr a^upto), default upto = n."""
    if upto is None:
        upto = a.n
    if upto < 1:
        raise InvalidInputError("upto must be at least 1")
    return tuple(p.trace() for p in a.powers(upto))


def newton_traces_to_coeffs(t):
    """Power sums t_k -> coefficients alpha_k of x^n + alpha_1 x^(n-1) + ... + alpha_n."""
    t = [as_scalar(v) for v in t]
    alpha = []
    for k in range(1, len(t) + 1):
        s = t[k - 1]
        for i in range(1, k):
            s = s + alpha[i - 1] * t[k - i - 1]
        alpha.append(_norm(div(-s, k)))
    return tuple(alpha)


def newton_coeffs_to_traces(alpha):
    """Coefficients alpha_k -> power sums t_k, inverse of newton_traces_to_coeffs."""
    alpha = [as_scalar(v) for v in alpha]
    t = []
    for k in range(1, len(alpha) + 1):
        s = k * alpha[k - 1]
        for i in range(1, k):
            s = s + alpha[i - 1] * t[k - i - 1]
        t.append(_norm(-s))
    return tuple(t)


# -- commutative polynomials --------------------------------------------------------


class CommPoly:
    """Commutative polynomial as {exponent tuple: coefficient} in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise InvalidInputError(f"exponent {e} has wrong length for {nvars} variables")
            c = as_scalar(c)
            if c != 0:
                clean[e] = c
        self.terms = clean

    @classmethod
    def var(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    def _lift(self, other):
        if isinstance(other, CommPoly):
            if other.nvars != self.nvars:
                raise InvalidInputError("variable counts differ")
            return other
        return CommPoly.const(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = _norm(out.get(e, 0) + c)
        return CommPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return CommPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return CommPoly(self.nvars, {e: _norm(c) for e, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, k):
        out = CommPoly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, CommPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def __call__(self, *values):
        if len(values) == 1 and isinstance(values[0], (list, tuple)):
            values = values[0]
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * v**k
            total = total + term
        return _norm(total)

    def substitute(self, images):
        """Compose with a list of CommPoly images (one per variable)."""
        nv = images[0].nvars
        out = CommPoly(nv)
        for e, c in self.terms.items():
            term = CommPoly.const(nv, c)
            for img, k in zip(images, e):
                if k:
                    term = term * img**k
            out = out + term
        return out

    def permute(self, perm):
        """Variables permuted: variable i becomes perm[i]."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * self.nvars
            for i, k in enumerate(e):
                ne[perm[i]] = k
            out[tuple(ne)] = c
        return CommPoly(self.nvars, out)

    def is_symmetric(self):
        for i in range(self.nvars - 1):
            perm = list(range(self.nvars))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            if self.permute(perm) != self:
                return False
        return True

    def __repr__(self):
        if not self.terms:
            return "CommPoly(0)"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"z{i}^{k}" if k > 1 else f"z{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "CommPoly(" + " + ".join(parts) + ")"


def elementary_symmetric(n, k):
    out = {}
    for combo in itertools.combinations(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] = 1
        out[tuple(e)] = 1
    return CommPoly(n, out)


def power_sum(n, k):
    out = {}
    for i in range(n):
        e = [0] * n
        e[i] = k
        out[tuple(e)] = 1
    return CommPoly(n, out)


def symmetric_to_elementary(p):
    """Express a symmetric p(l_1..l_n) as a polynomial in e_1..e_n (leading-term subtraction)."""
    n = p.nvars
    if not p.is_symmetric():
        raise InvalidInputError("polynomial is not symmetric")
    elem = [elementary_symmetric(n, k) for k in range(1, n + 1)]
    result = CommPoly(n)
    rest = p
    while not rest.is_zero():
        lead = max(rest.terms)
        c = rest.terms[lead]
        ex = [lead[i] - (lead[i + 1] if i + 1 < n else 0) for i in range(n)]
        if any(v < 0 for v in ex):
            raise InvalidInputError("polynomial is not symmetric")
        mono = CommPoly(n, {tuple(ex): c})
        result = result + mono
        rest = rest - mono.substitute(elem)
    return result


def newton_alpha_polys(n):
    """alpha_k(z_1..z_n) as CommPoly in n variables (z_k = tr(x^k))."""
    z = [CommPoly.var(n, i) for i in range(n)]
    alpha = []
    for k in range(1, n + 1):
        s = z[k - 1]
        for i in range(1, k):
            s = s + alpha[i - 1] * z[k - i - 1]
        alpha.append(s * Fraction(-1, k))
    return alpha


@dataclass(frozen=True)
class TracePolyRep:
    """The map X -> P(X, tr(X) 1, ..., tr(X^n) 1) for P in z_0, ..., z_n.

    ``P`` must have zero constant term; the map is pure (scalar-valued, X
    entering only through traces) exactly when z_0 does not occur.
    """

    P: CommPoly
    n: int

    def __post_init__(self):
        if self.P.nvars != self.n + 1:
            raise InvalidInputError(f"P must have {self.n + 1} variables z0..z{self.n}")
        if any(not any(e) for e in self.P.terms):
            raise InvalidInputError("trace polynomials have zero constant term")

    @property
    def pure(self):
        return all(e[0] == 0 for e in self.P.terms)

    @classmethod
    def from_terms(cls, n, terms):
        return cls(CommPoly(n + 1, terms), n)

    @classmethod
    def power(cls, n, k):
        """X^k."""
        e = [0] * (n + 1)
        e[0] = k
        return cls.from_terms(n, {tuple(e): 1})

    def weights(self):
        return {e: e[0] + sum(k * v for k, v in enumerate(e) if k) for e in self.P.terms}

    def is_homogeneous(self):
        return len(set(self.weights().values())) <= 1

    def homogeneous_components(self):
        by_w = {}
        for e, w in self.weights().items():
            by_w.setdefault(w, {})[e] = self.P.terms[e]
        return [TracePolyRep(CommPoly(self.n + 1, by_w[w]), self.n) for w in sorted(by_w)]

    @property
    def degree(self):
        """Degree in the matrix entries of X (weight of z_k is k)."""
        return max(self.weights().values(), default=-1)

    @property
    def trace_degree(self):
        """Ordinary degree in z_1, ..., z_n."""
        return max((sum(e[1:]) for e in self.P.terms), default=0)

    def evaluate(self, X):
        n = X.n
        if n != self.n:
            raise DimensionMismatchError(f"trace polynomial for M_{self.n} evaluated on M_{n}")
        kmax = max(max((e[0] for e in self.P.terms), default=0), n)
        pw = [Matrix.identity(n)] + X.powers(kmax)
        tr = [None] + [pw[k].trace() for k in range(1, n + 1)]
        out = Matrix.zero(n)
        for e, c in self.P.terms.items():
            s = c
            for k in range(1, n + 1):
                if e[k]:
                    s = s * tr[k] ** e[k]
            out = out + pw[e[0]] * _norm(s)
        return out

    def scalar(self, X):
        if not self.pure:
            raise InvalidInputError("only pure trace polynomials are scalar-valued")
        return self.evaluate(X)[0, 0]

    def __call__(self, X):
        return self.evaluate(X)


def sym_to_trace(p):
    """Pure trace polynomial q with p(eigenvalues of X) = q(tr X, ..., tr X^n)."""
    n = p.nvars
    q_e = symmetric_to_elementary(p)
    alpha = newton_alpha_polys(n)
    # Vieta: e_i = (-1)^i alpha_i
    e_in_z = [alpha[i] * (-1) ** (i + 1) for i in range(n)]
    q = q_e.substitute(e_in_z)
    lifted = {(0,) + e: c for e, c in q.terms.items()}
    if (0,) * (n + 1) in lifted:
        raise InvalidInputError("symmetric polynomial has a constant term; trace polynomials do not")
    return TracePolyRep(CommPoly(n + 1, lifted), n)


# -- Jacobians --------------------------------------------------------------------


def eval_trace_power_jacobian(f, point, k_set, ncols_vars=None):
    """Exact Jacobian of (a_1..a_d) -> (tr f(a)^k)_{k in k_set} at ``point``.

    Rows follow sorted(k_set); columns run over arguments, then row-major
    matrix entries (n^2 * d columns).
    """
    point = list(point)
    if not point:
        raise InvalidInputError("empty evaluation point")
    n = point[0].n
    if any(a.n != n for a in point):
        raise DimensionMismatchError("point matrices differ in size")
    ks = sorted(set(k_set))
    if not ks or ks[0] < 1:
        raise InvalidInputError("k_set must hold positive integers")
    d = len(point)
    if f.variables and max(f.variables) > d:
        raise InvalidInputError("point does not supply every variable")
    cols = []
    zero = Matrix.zero(n)
    for m in range(d):
        for p in range(n):
            for q in range(n):
                args = [
                    DualMatrix(a, Matrix.unit(n, p, q) if i == m else zero)
                    for i, a in enumerate(point)
                ]
                F = evaluate_dual(f, args)
                cols.append(_dual_trace_powers(F, ks))
    return [[cols[c][r] for c in range(len(cols))] for r in range(len(ks))]


def _dual_trace_powers(F, ks):
    out = []
    cur = F
    k = 1
    for target in ks:
        while k < target:
            cur = cur @ F
            k += 1
        out.append(cur.deriv.trace())
    return out


# -- matrix-unit grid ----------------------------------------------------------------


def unit_grid(f, n):
    """Values of a multilinear f on every tuple of matrix units.

    Returns {key: {(r, c): value}} listing only nonzero values; ``key``
    gives the 0-based unit (i, j) for each variable in ``f.variables``
    order.  Each word contributes along n^(deg+1) index chains, so the cost
    is len(f) * n^(deg+1) rather than n^(2 * deg) evaluations.
    """
    if not f.is_multilinear():
        raise InvalidInputError("the unit grid decides only multilinear polynomials")
    vs = f.variables
    pos = {v: i for i, v in enumerate(vs)}
    acc = {}
    d = len(vs)
    for w, c in f.items():
        slots = [pos[v] for v in w]
        for chain in itertools.product(range(n), repeat=d + 1):
            key = [None] * d
            for m, s in enumerate(slots):
                key[s] = (chain[m], chain[m + 1])
            key = tuple(key)
            entry = (chain[0], chain[-1])
            cell = acc.setdefault(key, {})
            cell[entry] = cell.get(entry, 0) + c
    out = {}
    for key, cell in acc.items():
        cell = {e: _norm(v) for e, v in cell.items() if v != 0}
        if cell:
            out[key] = cell
    return out


def unit_tuple(key, n):
    return [Matrix.unit(n, i, j) for i, j in key]


def grid_cell_is_scalar(cell, n):
    if any(r != c for r, c in cell):
        return False
    vals = [cell.get((i, i), 0) for i in range(n)]
    return all(v == vals[0] for v in vals)


def grid_cost(f, n):
    return len(f) * n ** (f.degree + 1)


def grid_tensor(f, n, xvars, fixed=None):
    """All values of f with xvars running over matrix units and the rest fixed.

    ``f`` must contain each variable of ``xvars`` exactly once per word; any
    other letter must be supplied in ``fixed``.  The result is a numpy
    object array with axes (r, u_1, v_1, ..., u_t, v_t, c): entry (r, c) of
    f when x_{xvars[k]} = e_{u_k v_k}.
    """
    import numpy as np

    fixed = fixed or {}
    xvars = tuple(xvars)
    xpos = {v: k for k, v in enumerate(xvars)}
    t = len(xvars)
    ident = Matrix.identity(n)
    by_order = {}
    for w, c in f.items():
        order = [v for v in w if v in xpos]
        if sorted(order, key=xpos.get) != list(xvars) or len(order) != t:
            raise InvalidInputError(f"word {w} is not linear in every grid variable")
        segs = [ident]
        for v in w:
            if v in xpos:
                segs.append(ident)
            else:
                if v not in fixed:
                    raise InvalidInputError(f"no matrix supplied for x{v}")
                segs[-1] = segs[-1] @ fixed[v]
        T = np.array(segs[0].rows(), dtype=object)
        for s in segs[1:]:
            T = np.multiply.outer(T, np.array(s.rows(), dtype=object))
        T = T * c
        key = tuple(order)
        if key in by_order:
            by_order[key] = by_order[key] + T
        else:
            by_order[key] = T
    out = np.zeros((n,) * (2 * t + 2), dtype=object)
    for order, T in by_order.items():
        # word-order slot k holds variable order[k]; move it to slot xpos[order[k]]
        perm = [0] * (2 * t + 2)
        perm[0], perm[-1] = 0, 2 * t + 1
        dest = [0] + [None] * (2 * t) + [2 * t + 1]
        for k, v in enumerate(order):
            dest[1 + 2 * xpos[v]] = 1 + 2 * k
            dest[2 + 2 * xpos[v]] = 2 + 2 * k
        out = out + np.transpose(T, dest)
    return out
