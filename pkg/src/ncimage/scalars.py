"""Exact scalars: rationals and elements of cyclotomic fields Q(zeta_m).

Rationals are plain :class:`fractions.Fraction` (or ``int``).  A
:class:`Cyc` stores coordinates on the power basis
``1, z, ..., z^(phi(m)-1)`` of ``Q(zeta_m)``, reduced modulo the m-th
cyclotomic polynomial.  Arithmetic results whose value is rational are
returned as ``Fraction`` so that rational code paths never see a ``Cyc``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational

from .errors import FieldMismatchError, InvalidInputError


def _lcm(a, b):
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def cyclotomic_poly(m):
    """Integer coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise InvalidInputError(f"conductor must be positive, got {m}")
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_exact_div(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        q = num[k + len(den) - 1] // lead
        out[k] = q
        if q:
            for i, c in enumerate(den):
                num[k + i] -= q * c
    assert not any(num[: len(den) - 1])
    return out


@lru_cache(maxsize=None)
def totient(m):
    return len(cyclotomic_poly(m)) - 1


@lru_cache(maxsize=None)
def _power_table(m):
    """Reduced coordinates of z^k for 0 <= k < m."""
    phi = totient(m)
    cp = cyclotomic_poly(m)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by z
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * cp[i]
    return tuple(rows)


def _reduce(coeffs, m):
    """Reduce a coefficient list of any length modulo Phi_m."""
    phi = totient(m)
    if len(coeffs) <= phi:
        return list(coeffs) + [0] * (phi - len(coeffs))
    table = _power_table(m)
    out = list(coeffs[:phi])
    for k in range(phi, len(coeffs)):
        c = coeffs[k]
        if c:
            row = table[k % m]
            for i in range(phi):
                if row[i]:
                    out[i] += c * row[i]
    return out


def _normalize(x):
    """Collapse integral Fractions to int and leave everything else alone."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


class Cyc:
    """An irrational element of Q(zeta_m) on the power basis.

    Use :func:`cyc` or :func:`zeta` to build values; they demote rational
    results automatically.
    """

    __slots__ = ("m", "c", "_key")

    def __init__(self, m, coeffs):
        self.m = m
        self.c = tuple(Fraction(v) for v in coeffs)
        self._key = None

    # -- construction helpers -------------------------------------------
    @staticmethod
    def _make(m, coeffs):
        coeffs = _reduce(coeffs, m)
        if not any(coeffs[1:]):
            return _normalize(Fraction(coeffs[0]))
        return Cyc(m, coeffs)

    def embed(self, big):
        """Coordinates of this element inside Q(zeta_big); ``m`` must divide ``big``."""
        if big % self.m:
            raise FieldMismatchError(f"Q(zeta_{self.m}) does not embed in Q(zeta_{big})")
        if big == self.m:
            return list(self.c)
        step = big // self.m
        table = _power_table(big)
        out = [Fraction(0)] * totient(big)
        for i, v in enumerate(self.c):
            if v:
                row = table[(i * step) % big]
                for k, r in enumerate(row):
                    if r:
                        out[k] += v * r
        return out

    # -- arithmetic -----------------------------------------------------
    def _coerce_pair(self, other):
        if isinstance(other, Cyc):
            m = _lcm(self.m, other.m)
            return m, self.embed(m), other.embed(m)
        if isinstance(other, (int, Fraction)):
            a = list(self.c)
            b = [Fraction(other)] + [Fraction(0)] * (len(a) - 1)
            return self.m, a, b
        return None

    def __add__(self, other):
        p = self._coerce_pair(other)
        if p is None:
            return NotImplemented
        m, a, b = p
        return Cyc._make(m, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.m, [-v for v in self.c])

    def __pos__(self):
        return self

    def __sub__(self, other):
        p = self._coerce_pair(other)
        if p is None:
            return NotImplemented
        m, a, b = p
        return Cyc._make(m, [x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return 0
            return Cyc(self.m, [v * other for v in self.c])
        p = self._coerce_pair(other)
        if p is None:
            return NotImplemented
        m, a, b = p
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return Cyc._make(m, prod)

    __rmul__ = __mul__

    def inverse(self):
        # Solve (self * y) = 1 as a linear system over Q.
        m = self.m
        phi = totient(m)
        cols = []
        for k in range(phi):
            basis = [0] * phi
            basis[k] = 1
            cols.append(_reduce(_convolve(self.c, basis), m))
        rows = [[Fraction(cols[k][i]) for k in range(phi)] + [Fraction(int(i == 0))] for i in range(phi)]
        sol = _solve_square(rows)
        return Cyc._make(m, sol)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return Cyc(self.m, [v / other for v in self.c])
        if isinstance(other, Cyc):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = 1
        base = self
        while e:
            if e & 1:
                result = base * result
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return False  # a Cyc instance is never rational
        if isinstance(other, Cyc):
            m = _lcm(self.m, other.m)
            return self.embed(m) == other.embed(m)
        return NotImplemented

    def __hash__(self):
        return hash(self.canonical())

    def canonical(self):
        """(conductor, coords) at the smallest conductor that contains this value."""
        if self._key is None:
            self._key = _canonical(self)
        return self._key

    def __bool__(self):
        return True

    def conj(self):
        """Complex conjugate (z -> z^-1)."""
        table = _power_table(self.m)
        out = [Fraction(0)] * totient(self.m)
        for i, v in enumerate(self.c):
            if v:
                row = table[(-i) % self.m]
                for k, r in enumerate(row):
                    if r:
                        out[k] += v * r
        return Cyc._make(self.m, out)

    def __complex__(self):
        import cmath

        z = cmath.exp(2j * cmath.pi / self.m)
        return sum(complex(float(v)) * z**i for i, v in enumerate(self.c))

    def __repr__(self):
        return format_scalar(self)


def _convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _solve_square(rows):
    """Gauss-Jordan on an augmented square system with a unique solution."""
    n = len(rows)
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return [rows[r][n] for r in range(n)]


def _canonical(x):
    m = x.m
    for d in _candidate_subconductors(m):
        coords = _descend(x, d)
        if coords is not None:
            return (d, tuple(coords))
    return (m, x.c)


def _candidate_subconductors(m):
    return [d for d in range(3, m + 1) if m % d == 0 and d % 4 != 2]


def _descend(x, d):
    """Coordinates of x in Q(zeta_d) if x lies there, else None."""
    m = x.m
    if d == m:
        return list(x.c)
    phid = totient(d)
    cols = []
    for k in range(phid):
        basis = [0] * phid
        basis[k] = 1
        cols.append(Cyc(d, basis).embed(m))
    phim = totient(m)
    # least squares is unnecessary: solve the overdetermined system exactly
    aug = [[cols[k][i] for k in range(phid)] + [x.c[i]] for i in range(phim)]
    sol = _solve_overdetermined(aug, phid)
    return sol


def _solve_overdetermined(aug, ncols):
    rows = [list(r) for r in aug]
    piv_cols = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    if any(rows[i][ncols] != 0 for i in range(r, len(rows))):
        return None
    sol = [Fraction(0)] * ncols
    for i, col in enumerate(piv_cols):
        sol[col] = rows[i][ncols]
    return sol


# -- public helpers --------------------------------------------------------


def zeta(m, k=1):
    """The power z_m^k of the primitive root exp(2 pi i / m)."""
    if m < 1:
        raise InvalidInputError(f"conductor must be positive, got {m}")
    row = _power_table(m)[k % m]
    return Cyc._make(m, row)


def cyc(m, coeffs):
    """Element sum(coeffs[i] * z_m^i); coefficient lists of any length are reduced."""
    return Cyc._make(m, [Fraction(c) for c in coeffs])


def is_rational(x):
    return isinstance(x, (int, Fraction)) or isinstance(x, Rational)


def conductor(x):
    """Smallest m with x in Q(zeta_m) as represented (1 for rationals)."""
    if isinstance(x, Cyc):
        return x.canonical()[0]
    return 1


def as_scalar(x):
    """Coerce ints, Fractions, numeric strings and Cyc values to canonical scalars."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return _normalize(x)
    if isinstance(x, Cyc):
        return x
    if isinstance(x, str):
        return _normalize(Fraction(x))
    if isinstance(x, Rational):
        return _normalize(Fraction(x.numerator, x.denominator))
    raise InvalidInputError(f"not an exact scalar: {x!r}")


def div(a, b):
    """Exact quotient; never falls back to float."""
    if isinstance(a, int) and isinstance(b, int):
        return _normalize(Fraction(a, b))
    q = a / b
    return _normalize(q) if isinstance(q, Fraction) else q


def rational_root(r, k):
    """The real k-th root of a rational if it is rational, else None."""
    r = Fraction(r)
    if r == 0:
        return 0
    sign = 1
    if r < 0:
        if k % 2 == 0:
            return None
        sign, r = -1, -r
    num = _int_root(r.numerator, k)
    den = _int_root(r.denominator, k)
    if num is None or den is None:
        return None
    return _normalize(sign * Fraction(num, den))


def quadratic_sqrt(r):
    """A square root of the rational r inside a cyclotomic field (Gauss sums)."""
    from sympy import factorint

    r = Fraction(r)
    if r == 0:
        return 0
    q = rational_root(abs(r), 2)
    if q is not None:
        return q if r > 0 else q * zeta(4)
    # sqrt(a/b) = sqrt(a b) / b
    n = r.numerator * r.denominator
    out = Fraction(1, r.denominator)
    if n < 0:
        out, n = out * zeta(4), -n
    for p, e in factorint(n).items():
        out = out * p ** (e // 2)
        if e % 2 == 0:
            continue
        if p == 2:
            out = out * (zeta(8) + zeta(8, 7))
            continue
        g = sum(zeta(p, a) * (1 if pow(a, (p - 1) // 2, p) == 1 else -1) for a in range(1, p))
        out = out * (g if p % 4 == 1 else -g * zeta(4))
    return out


def _int_root(n, k):
    if n < 2:
        return n
    lo, hi = 1, 1 << (n.bit_length() // k + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid**k
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def format_scalar(x):
    """Render a scalar in the matrix-literal syntax."""
    if isinstance(x, Cyc):
        d, coords = x.canonical()
        parts = []
        for k, v in enumerate(coords):
            if v == 0:
                continue
            if k == 0:
                parts.append(_fmt_q(v))
            else:
                parts.append(f"{_fmt_q(v)}*z{{{d}}}^{k}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out
    return _fmt_q(Fraction(x))


def _fmt_q(v):
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# -- coefficient fields ----------------------------------------------------


class RationalField:
    """The field Q."""

    conductor = 1

    def coerce(self, x):
        x = as_scalar(x)
        if isinstance(x, Cyc):
            raise FieldMismatchError(f"{x!r} is not rational")
        return x

    def contains(self, x):
        return is_rational(x)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class CyclotomicField:
    """The field Q(zeta_m); scalars of any conductor dividing m are accepted."""

    def __init__(self, m):
        if m < 1:
            raise InvalidInputError(f"conductor must be positive, got {m}")
        self.conductor = m

    def coerce(self, x):
        x = as_scalar(x)
        if isinstance(x, Cyc) and self.conductor % conductor(x):
            raise FieldMismatchError(f"{x!r} does not lie in Q(zeta_{self.conductor})")
        return x

    def contains(self, x):
        return not isinstance(x, Cyc) or self.conductor % conductor(x) == 0

    def __eq__(self, other):
        if isinstance(other, RationalField):
            return self.conductor in (1, 2)
        return isinstance(other, CyclotomicField) and (
            self.conductor == other.conductor
            or {self.conductor, other.conductor} <= {1, 2}
        )

    def __hash__(self):
        return hash("QQ") if self.conductor in (1, 2) else hash(("CF", self.conductor))

    def __repr__(self):
        return f"QQ(zeta_{self.conductor})"


QQ = RationalField()


def field_of(values):
    """Smallest cyclotomic field (by conductor lcm) containing all values."""
    m = 1
    for v in values:
        if isinstance(v, Cyc):
            m = _lcm(m, conductor(v))
    return QQ if m == 1 else CyclotomicField(m)
