"""Exact square matrices over Q and Q(zeta_m).

Entries are ``int``, ``Fraction`` or :class:`~ncimage.scalars.Cyc`; every
operation is exact.  Rank and determinant use fraction-free (Bareiss)
elimination, the characteristic polynomial uses the division-free
Berkowitz recursion so it stays independent of trace/Newton code.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd

from .errors import DimensionMismatchError, InvalidInputError, PreconditionError
from .scalars import Cyc, as_scalar, conductor, div, format_scalar, zeta


class Matrix:
    """Immutable n x n matrix stored row-major in a flat tuple."""

    __slots__ = ("n", "e", "_hash")

    def __init__(self, n, entries):
        self.n = n
        self.e = tuple(entries)
        self._hash = None
        if len(self.e) != n * n:
            raise DimensionMismatchError(f"expected {n * n} entries, got {len(self.e)}")

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatchError("matrix must be square and nonempty")
        return cls(n, [as_scalar(v) for r in rows for v in r])

    @classmethod
    def zero(cls, n):
        return cls(n, [0] * (n * n))

    @classmethod
    def identity(cls, n):
        return cls(n, [int(i == j) for i in range(n) for j in range(n)])

    @classmethod
    def scalar(cls, n, c):
        c = as_scalar(c)
        return cls(n, [c if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def unit(cls, n, i, j):
        """Matrix unit e_ij with 0-based indices."""
        e = [0] * (n * n)
        e[i * n + j] = 1
        return cls(n, e)

    @classmethod
    def diag(cls, values):
        values = [as_scalar(v) for v in values]
        n = len(values)
        return cls(n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def random(cls, n, rng, bound=10**4):
        return cls(n, [rng.randint(-bound, bound) for _ in range(n * n)])

    # -- access -----------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.e[i * self.n + j]

    def rows(self):
        n = self.n
        return [list(self.e[i * n : (i + 1) * n]) for i in range(n)]

    def diagonal(self):
        return [self.e[i * self.n + i] for i in range(self.n)]

    def conductor(self):
        m = 1
        for v in self.e:
            if isinstance(v, Cyc):
                c = conductor(v)
                m = m * c // gcd(m, c)
        return m

    def is_rational(self):
        return not any(isinstance(v, Cyc) for v in self.e)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.n != self.n:
            raise DimensionMismatchError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return Matrix(self.n, [a + b for a, b in zip(self.e, other.e)])

    def __sub__(self, other):
        self._check(other)
        return Matrix(self.n, [a - b for a, b in zip(self.e, other.e)])

    def __neg__(self):
        return Matrix(self.n, [-a for a in self.e])

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return self @ c
        c = as_scalar(c)
        if c == 1:
            return self
        return Matrix(self.n, [_norm(c * a) for a in self.e])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Matrix(self.n, [div(a, c) for a in self.e])

    def __matmul__(self, other):
        self._check(other)
        n = self.n
        a, b = self.e, other.e
        out = []
        for i in range(n):
            row = a[i * n : (i + 1) * n]
            for j in range(n):
                s = 0
                for k in range(n):
                    x = row[k]
                    if x:
                        y = b[k * n + j]
                        if y:
                            s = s + x * y
                out.append(_norm(s))
        return Matrix(n, out)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise InvalidInputError("matrix powers must be nonnegative integers")
        result = Matrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def powers(self, kmax):
        """[a, a^2, ..., a^kmax]."""
        out = []
        cur = self
        for _ in range(kmax):
            out.append(cur)
            cur = cur @ self
        return out

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.n == other.n and self.e == other.e

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.e))
        return self._hash

    def transpose(self):
        n = self.n
        return Matrix(n, [self.e[j * n + i] for i in range(n) for j in range(n)])

    def trace(self):
        s = 0
        for i in range(self.n):
            s = s + self.e[i * self.n + i]
        return _norm(s)

    def is_zero(self):
        return not any(self.e)

    def is_scalar(self):
        n = self.n
        d = self.e[0]
        for i in range(n):
            for j in range(n):
                v = self.e[i * n + j]
                if (i == j and v != d) or (i != j and v != 0):
                    return False
        return True

    def apply(self, fn):
        return Matrix(self.n, [as_scalar(fn(v)) for v in self.e])

    def block(self, start):
        """Trailing principal block starting at row/column ``start``."""
        n = self.n
        m = n - start
        return Matrix(m, [self.e[i * n + j] for i in range(start, n) for j in range(start, n)])

    def embed(self, big):
        """Upper-left corner embedding into M_big (zeros elsewhere)."""
        n = self.n
        out = [0] * (big * big)
        for i in range(n):
            for j in range(n):
                out[i * big + j] = self.e[i * n + j]
        return Matrix(big, out)

    # -- exact linear algebra --------------------------------------------
    def det(self):
        return bareiss(self.rows())[1]

    def rank(self):
        return bareiss(self.rows())[0]

    def inverse(self):
        n = self.n
        rows = [r + [int(i == j) for j in range(n)] for i, r in enumerate(self.rows())]
        for col in range(n):
            piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
            if piv is None:
                raise PreconditionError("matrix is singular")
            rows[col], rows[piv] = rows[piv], rows[col]
            p = rows[col][col]
            rows[col] = [div(v, p) for v in rows[col]]
            for r in range(n):
                f = rows[r][col]
                if r != col and f != 0:
                    rows[r] = [_norm(a - f * b) for a, b in zip(rows[r], rows[col])]
        return Matrix(n, [rows[i][n + j] for i in range(n) for j in range(n)])

    def is_invertible(self):
        return self.det() != 0

    def char_poly(self):
        return char_poly(self)

    def rank_sequence(self):
        return rank_sequence(self)

    # -- text -------------------------------------------------------------
    def to_literal(self):
        return ";".join(",".join(format_scalar(v) for v in row) for row in self.rows())

    def __repr__(self):
        return f"Matrix({self.to_literal()!r})"

    def __str__(self):
        cells = [[format_scalar(v) for v in row] for row in self.rows()]
        w = max(len(c) for row in cells for c in row)
        return "\n".join("[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells)


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def bareiss(rows):
    """Fraction-free elimination; returns (rank, determinant-or-0).

    The determinant is only meaningful for square input.
    """
    a = [list(r) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    prev = 1
    sign = 1
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][col] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        p = a[r][col]
        for i in range(r + 1, nrows):
            lead = a[i][col]
            row_i = a[i]
            row_r = a[r]
            for j in range(col + 1, ncols):
                row_i[j] = div(p * row_i[j] - lead * row_r[j], prev)
            row_i[col] = 0
        prev = p
        r += 1
    det = 0
    if nrows == ncols and r == nrows:
        det = _norm(sign * a[-1][-1]) if nrows else 1
    return r, det


def rref(rows):
    """Reduced row echelon form over the exact scalars; returns (rows, pivot columns)."""
    a = [list(r) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        a[r] = [_norm(div(v, p)) for v in a[r]]
        for i in range(nrows):
            if i != r and a[i][col] != 0:
                lead = a[i][col]
                a[i] = [_norm(x - lead * y) for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a, pivots


def solve_linear(rows, rhs):
    """One solution of rows . u = rhs (free unknowns set to 0), or None when inconsistent."""
    ncols = len(rows[0]) if rows else 0
    red, pivots = rref([list(r) + [b] for r, b in zip(rows, rhs)])
    if ncols in pivots:
        return None
    sol = [0] * ncols
    for i, p in enumerate(pivots):
        sol[p] = red[i][ncols]
    return sol


def nullspace(rows, ncols=None):
    """Basis of {u : rows . u = 0}."""
    ncols = len(rows[0]) if rows else ncols
    red, pivots = rref(rows)
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[free] = 1
        for i, p in enumerate(pivots):
            v[p] = _norm(-red[i][free])
        basis.append(v)
    return basis


def rank_of(rows):
    """Rank of a rectangular list-of-lists matrix."""
    if not rows:
        return 0
    return bareiss(rows)[0]


def char_poly(a):
    """Coefficients (alpha_1, ..., alpha_n) of det(xI - a) = x^n + alpha_1 x^(n-1) + ...

    Berkowitz's algorithm: division-free, so it stays exact in any
    commutative ring and shares no code path with the trace machinery.
    """
    n = a.n
    rows = a.rows()
    # coefficient vector of the char poly of the trailing 1x1 block, highest degree first
    poly = [1, _norm(-rows[n - 1][n - 1])]
    for k in range(n - 2, -1, -1):
        # block A_k = [[a_kk, R], [C, S]] with S the already-processed trailing block
        akk = rows[k][k]
        R = rows[k][k + 1 :]
        C = [rows[i][k] for i in range(k + 1, n)]
        S = [r[k + 1 :] for r in rows[k + 1 :]]
        m = n - k - 1
        # Toeplitz column: 1, -a_kk, -R C, -R S C, ..., -R S^(m-1) C
        col = [1, _norm(-akk)]
        v = C
        for _ in range(m):
            col.append(_norm(-sum((R[i] * v[i] for i in range(m)), 0)))
            v = [sum((S[i][j] * v[j] for j in range(m)), 0) for i in range(m)]
        # new poly = T * poly, T lower-triangular Toeplitz of size (m+2) x (m+1)
        new = []
        for i in range(m + 2):
            s = 0
            for j in range(min(i, m) + 1):
                s = s + col[i - j] * poly[j]
            new.append(_norm(s))
        poly = new
    return tuple(poly[1:])


def rank_sequence(a):
    """(rank a, rank a^2, ..., rank a^n)."""
    return tuple(p.rank() for p in a.powers(a.n))


def nilpotent_partition(ranks, n):
    """Jordan partition of a nilpotent matrix from its rank sequence."""
    r = [n] + list(ranks)
    ge = [r[k - 1] - r[k] for k in range(1, len(r))]  # blocks of size >= k
    parts = []
    for k in range(len(ge)):
        exact = ge[k] - (ge[k + 1] if k + 1 < len(ge) else 0)
        parts.extend([k + 1] * exact)
    return tuple(sorted(parts, reverse=True))


def partition_rank_sequence(partition, n):
    """Rank sequence of the nilpotent Jordan matrix with the given block sizes."""
    return tuple(sum(max(p - k, 0) for p in partition) for k in range(1, n + 1))


def jordan_nilpotent(partition):
    """Nilpotent matrix in Jordan form with the given block sizes."""
    n = sum(partition)
    e = [0] * (n * n)
    pos = 0
    for p in partition:
        for i in range(p - 1):
            e[(pos + i) * n + pos + i + 1] = 1
        pos += p
    return Matrix(n, e)


def block_diag(*blocks):
    n = sum(b.n for b in blocks)
    e = [0] * (n * n)
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                e[(off + i) * n + off + j] = b.e[i * b.n + j]
        off += b.n
    return Matrix(n, e)


def companion(coeffs):
    """Companion matrix of x^n + c_1 x^(n-1) + ... + c_n."""
    n = len(coeffs)
    e = [0] * (n * n)
    for i in range(1, n):
        e[i * n + i - 1] = 1
    for i in range(n):
        e[i * n + n - 1] = as_scalar(-coeffs[n - 1 - i])
    return Matrix(n, e)


def wj_matrix(n, j):
    """Block diagonal diag(1_r, mu 1_r, ..., mu^(j-1) 1_r) with r = n/j, mu = zeta_j."""
    if j < 1 or n % j:
        raise InvalidInputError(f"j={j} does not divide n={n}")
    r = n // j
    vals = []
    for k in range(j):
        vals.extend([zeta(j, k)] * r)
    return Matrix.diag(vals)


def poly_at_matrix(coeffs, a):
    """Evaluate a polynomial (highest degree first) at a matrix by Horner."""
    out = Matrix.zero(a.n)
    ident = Matrix.identity(a.n)
    for c in coeffs:
        out = out @ a + ident * c
    return out


# -- similarity -----------------------------------------------------------


def _to_sympy_factors(coeffs):
    """Factor x^n + c_1 x^(n-1) + ... over the smallest cyclotomic field holding the c_i.

    Returns [(factor coefficient list highest-first, multiplicity)].
    """
    import sympy as sp

    m = 1
    for c in coeffs:
        if isinstance(c, Cyc):
            cm = conductor(c)
            m = m * cm // gcd(m, cm)
    x = sp.Symbol("x")
    full = [1] + list(coeffs)
    if m == 1:
        poly = sp.Poly([sp.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in full], x, domain=sp.QQ)
        _, fl = poly.factor_list()
        return [([_from_mpq(v) for v in f.rep.to_list()], e) for f, e in fl]
    K = sp.QQ.algebraic_field(sp.exp(2 * sp.pi * sp.I / m))
    elems = [_cyc_to_anp(c, m, K) for c in full]
    poly = sp.Poly.from_list(elems, x, domain=K)
    _, fl = poly.factor_list()
    out = []
    for f, e in fl:
        lst = f.rep.to_list()
        out.append(([_anp_to_cyc(v, m) for v in lst], e))
    return out


def _from_mpq(v):
    return _norm(Fraction(int(v.numerator), int(v.denominator)))


def _cyc_to_anp(c, m, K):
    if isinstance(c, Cyc):
        coords = c.embed(m)
    else:
        coords = [Fraction(c)]
    # ANP lists are highest power first in the generator zeta_m
    lst = [K.dom.convert(sq) for sq in _rev_q(coords)]
    from sympy.polys.polyclasses import ANP

    return ANP(lst, K.mod.to_list(), K.dom)


def _rev_q(coords):
    import sympy as sp

    coords = list(coords)
    while len(coords) > 1 and coords[-1] == 0:
        coords.pop()
    return [sp.Rational(v.numerator, v.denominator) for v in map(Fraction, reversed(coords))]


def _anp_to_cyc(v, m):
    from .scalars import cyc

    lst = v.to_list() if hasattr(v, "to_list") else [v]
    coords = [Fraction(int(q.numerator), int(q.denominator)) for q in reversed(lst)]
    return cyc(m, coords) if coords else 0


def irreducible_factors(a):
    """Irreducible factors of char_poly(a) over its coefficient field, with multiplicities."""
    return _to_sympy_factors(list(char_poly(a)))


def similarity_invariants(a):
    """Rank data deciding the conjugacy class of ``a`` over the algebraic closure.

    Returns (char_poly, {factor: (rank p(a), rank p(a)^2, ..., rank p(a)^e)}).
    """
    cp = char_poly(a)
    data = {}
    for fac, mult in _to_sympy_factors(list(cp)):
        pa = poly_at_matrix(fac, a)
        data[tuple(fac)] = tuple(p.rank() for p in pa.powers(mult))
    return cp, data


def is_similar(a, b):
    """True iff a and b are conjugate over the algebraic closure."""
    if a.n != b.n:
        raise DimensionMismatchError(f"dimension mismatch: {a.n} vs {b.n}")
    cp = char_poly(a)
    if cp != char_poly(b):
        return False
    for fac, mult in _to_sympy_factors(list(cp)):
        pa = poly_at_matrix(fac, a).powers(mult)
        pb = poly_at_matrix(fac, b).powers(mult)
        if any(x.rank() != y.rank() for x, y in zip(pa, pb)):
            return False
    return True


def is_diagonalizable(a):
    """Minimal polynomial squarefree: the product of the distinct irreducible factors kills a."""
    prod = Matrix.identity(a.n)
    for fac, _ in _to_sympy_factors(list(char_poly(a))):
        prod = prod @ poly_at_matrix(fac, a)
    return prod.is_zero()


def jordan_data(a):
    """Scale-free Jordan structure of ``a`` over the algebraic closure.

    Returns (partition of the zero eigenvalue, sorted tuple of partitions of
    the nonzero eigenvalues, one per distinct eigenvalue).
    """
    zero_part = ()
    others = []
    cp = char_poly(a)
    for fac, mult in _to_sympy_factors(list(cp)):
        deg = len(fac) - 1
        pa = poly_at_matrix(fac, a)
        ranks = [a.n] + [p.rank() for p in pa.powers(mult)]
        ge = [(ranks[k - 1] - ranks[k]) // deg for k in range(1, len(ranks))]
        parts = []
        for k in range(len(ge)):
            exact = ge[k] - (ge[k + 1] if k + 1 < len(ge) else 0)
            parts.extend([k + 1] * exact)
        part = tuple(sorted(parts, reverse=True))
        if deg == 1 and fac[1] == 0:
            zero_part = part
        else:
            others.extend([part] * deg)
    return zero_part, tuple(sorted(others))


# -- Shoda reduction ---------------------------------------------------------


def shoda_zero_diagonal(a):
    """Invertible t with t a t^-1 having zero diagonal; requires tr(a) = 0."""
    if a.trace() != 0:
        raise PreconditionError("Shoda reduction needs a trace-zero matrix")
    n = a.n
    t = Matrix.identity(n)
    if all(v == 0 for v in a.diagonal()):
        return t
    cur = a
    for p in range(n - 1):
        blk = cur.block(p)
        if blk.is_zero():
            break
        v = _non_eigen_vector(blk)
        m = blk.n
        bv = _matvec(blk, v)
        basis = _complete_basis([v, bv], m)
        P = Matrix(m, [basis[j][i] for i in range(m) for j in range(m)])
        full = _embed_lower(P, n, p)
        full_inv = full.inverse()
        cur = full_inv @ cur @ full
        t = full_inv @ t
    return t


def _matvec(a, v):
    n = a.n
    return [_norm(sum((a.e[i * n + j] * v[j] for j in range(n)), 0)) for i in range(n)]


def _non_eigen_vector(b):
    """A vector v with b v outside span(v); b must be nonscalar."""
    m = b.n
    units = []
    for i in range(m):
        v = [int(k == i) for k in range(m)]
        bv = _matvec(b, v)
        if any(bv[k] != 0 for k in range(m) if k != i):
            return v
        units.append(bv[i])
    # b is diagonal and nonscalar: mix two coordinates with distinct entries
    for i in range(m):
        for j in range(i + 1, m):
            if units[i] != units[j]:
                return [int(k in (i, j)) for k in range(m)]
    raise PreconditionError("trailing block is scalar but nonzero; trace would be nonzero")


def _complete_basis(vectors, m):
    basis = [list(v) for v in vectors]
    for i in range(m):
        if len(basis) == m:
            break
        cand = basis + [[int(k == i) for k in range(m)]]
        if rank_of(cand) == len(cand):
            basis = cand
    return basis


def _embed_lower(P, n, p):
    e = list(Matrix.identity(n).e)
    for i in range(P.n):
        for j in range(P.n):
            e[(p + i) * n + p + j] = P.e[i * P.n + j]
    return Matrix(n, e)


# -- literal format ----------------------------------------------------------

_TERM = re.compile(
    r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(?:z\{(\d+)\}(?:\^(\d+))?)?\s*"
)


def parse_scalar(text):
    """Parse ``p/q``, ``c*z{m}^k`` and sums of such terms."""
    s = text.strip()
    if not s:
        raise InvalidInputError("empty matrix entry")
    pos = 0
    total = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise InvalidInputError(f"bad matrix entry {text!r} at offset {pos}")
        sign, coef, cond, power = m.groups()
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        term = c if cond is None else c * zeta(int(cond), int(power or 1))
        total = total + term
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise InvalidInputError(f"bad matrix entry {text!r} at offset {pos}")
    return as_scalar(_norm(total) if not isinstance(total, Cyc) else total)


def parse_matrix(text):
    """Row-major literal: rows separated by ';', entries by ','."""
    rows = [r for r in text.strip().split(";")]
    parsed = [[parse_scalar(v) for v in r.split(",")] for r in rows]
    return Matrix.from_rows(parsed)


def lcm_conductor(mats):
    return reduce(lambda x, y: x * y // gcd(x, y), (m.conductor() for m in mats), 1)
