"""The free associative algebra F<x_1, ..., x_d>.

Polynomials are sparse maps from words (tuples of 1-based variable indices)
to exact scalars.  Values are immutable; every operation returns a new
polynomial in canonical form (no zero coefficients stored).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import FieldMismatchError, InvalidInputError, NotLinearError
from .scalars import QQ, Cyc, CyclotomicField, as_scalar, format_scalar


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class NcPoly:
    """Noncommutative polynomial with exact coefficients.

    >>> x1, x2 = NcPoly.var(1), NcPoly.var(2)
    >>> str(x1 * x2 - x2 * x1)
    'x1*x2 - x2*x1'
    """

    __slots__ = ("_terms", "field", "_hash")

    def __init__(self, terms=None, field=QQ):
        self.field = field
        clean = {}
        if terms:
            for w, c in terms.items():
                c = field.coerce(c)
                if c != 0:
                    w = tuple(w)
                    if any((not isinstance(i, int)) or i < 1 for i in w):
                        raise InvalidInputError(f"bad word {w!r}: variables are positive integers")
                    clean[w] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms, field):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.field = field
        obj._hash = None
        return obj

    # -- constructors ---------------------------------------------------
    @classmethod
    def var(cls, i, field=QQ):
        return cls({(i,): 1}, field)

    @classmethod
    def const(cls, c, field=QQ):
        return cls({(): c}, field)

    @classmethod
    def zero(cls, field=QQ):
        return cls({}, field)

    @classmethod
    def one(cls, field=QQ):
        return cls({(): 1}, field)

    @classmethod
    def monomial(cls, word, c=1, field=QQ):
        return cls({tuple(word): c}, field)

    # -- basic protocol --------------------------------------------------
    @property
    def terms(self):
        """Read-only view of the word -> coefficient map in sorted order."""
        return dict(sorted(self._terms.items()))

    def items(self):
        return sorted(self._terms.items())

    def coeff(self, word):
        return self._terms.get(tuple(word), 0)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, NcPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, Cyc)):
            return self._terms == ({(): other} if other != 0 else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- ring structure ----------------------------------------------------
    def _lift(self, other):
        if isinstance(other, NcPoly):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine polynomials over {self.field} and {other.field}")
            return other
        return NcPoly.const(other, self.field)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            v = _norm(out.get(w, 0) + c)
            if v == 0:
                out.pop(w, None)
            else:
                out[w] = v
        return NcPoly._raw(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        return NcPoly._raw({w: -c for w, c in self._terms.items()}, self.field)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c):
        c = self.field.coerce(c)
        if c == 0:
            return NcPoly.zero(self.field)
        return NcPoly._raw({w: _norm(c * v) for w, v in self._terms.items()}, self.field)

    def __mul__(self, other):
        if not isinstance(other, NcPoly):
            return self.scale(other)
        other = self._lift(other)
        out = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return NcPoly._raw({w: _norm(c) for w, c in out.items() if c != 0}, self.field)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise InvalidInputError("polynomial powers must be nonnegative integers")
        result = NcPoly.one(self.field)
        for _ in range(k):
            result = result * self
        return result

    def change_field(self, field):
        return NcPoly(self._terms, field)

    # -- structure -----------------------------------------------------------
    @property
    def variables(self):
        return tuple(sorted({i for w in self._terms for i in w}))

    @property
    def varcount(self):
        return len(self.variables)

    @property
    def degree(self):
        return max((len(w) for w in self._terms), default=-1)

    def degree_in(self, v):
        return max((w.count(v) for w in self._terms), default=-1)

    def multidegree(self):
        return tuple(self.degree_in(v) for v in self.variables)

    def is_multilinear(self):
        vs = self.variables
        return all(len(w) == len(vs) and set(w) == set(vs) for w in self._terms)

    def is_homogeneous(self):
        return len({len(w) for w in self._terms}) <= 1

    def is_multihomogeneous(self):
        vs = self.variables
        return all(len({w.count(v) for w in self._terms}) == 1 for v in vs)

    def structure(self):
        return Structure(
            degree=self.degree,
            multidegree=self.multidegree(),
            is_multilinear=self.is_multilinear(),
            is_homogeneous=self.is_homogeneous(),
            is_multihomogeneous=self.is_multihomogeneous(),
            variables=self.variables,
        )

    # -- printing ------------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for w, c in self.items():
            mono = "*".join(f"x{i}" for i in w)
            neg = False
            if not isinstance(c, Cyc) and c < 0:
                neg, c = True, -c
            if isinstance(c, Cyc):
                cs = f"({format_scalar(c)})"
            else:
                cs = format_scalar(c)
            if not mono:
                body = cs
            elif c == 1:
                body = mono
            else:
                body = f"{cs}*{mono}"
            parts.append(("-" if neg else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"NcPoly({str(self)!r})"


@dataclass(frozen=True)
class Structure:
    degree: int
    multidegree: tuple
    is_multilinear: bool
    is_homogeneous: bool
    is_multihomogeneous: bool
    variables: tuple


@dataclass(frozen=True)
class LieWord:
    """Right-normed bracket [x_{i_k}, ..., x_{i_1}] written in display order."""

    indices: tuple

    def expand(self, field=QQ):
        return lie_expand(self.indices, field)


def structure_queries(f):
    return f.structure()


def commutator(f, g):
    return f * g - g * f


def lie_expand(indices, field=QQ):
    """Expand [x_{i_1}, [x_{i_2}, [..., x_{i_k}]]] into the free algebra."""
    if isinstance(indices, LieWord):
        indices = indices.indices
    indices = tuple(indices)
    if not indices:
        raise InvalidInputError("a Lie word needs at least one letter")
    acc = NcPoly.var(indices[-1], field)
    for i in reversed(indices[:-1]):
        acc = commutator(NcPoly.var(i, field), acc)
    return acc


def bracket(*polys):
    """Right-normed bracket of arbitrary polynomials."""
    if not polys:
        raise InvalidInputError("empty bracket")
    acc = polys[-1]
    for p in reversed(polys[:-1]):
        acc = commutator(p, acc)
    return acc


def standard_poly(k, field=QQ):
    """St_k = sum over S_k of sgn(s) x_s(1) ... x_s(k)."""
    if k < 1:
        raise InvalidInputError("k must be positive")
    terms = {}
    for perm in itertools.permutations(range(k)):
        terms[tuple(p + 1 for p in perm)] = _perm_sign(perm)
    return NcPoly(terms, field)


def capelli_poly(k, field=QQ):
    """C_{2k-1}(x_1..x_k; y_1..y_{k-1}) with y_i stored as variable k+i."""
    if k < 1:
        raise InvalidInputError("k must be positive")
    terms = {}
    for perm in itertools.permutations(range(k)):
        word = []
        for pos, p in enumerate(perm):
            word.append(p + 1)
            if pos < k - 1:
                word.append(k + pos + 1)
        terms[tuple(word)] = _perm_sign(perm)
    return NcPoly(terms, field)


def substitute(f, sigma):
    """Homomorphic substitution x_v -> sigma[v]; every variable of f must be mapped."""
    missing = [v for v in f.variables if v not in sigma]
    if missing:
        raise InvalidInputError(f"substitution leaves variables unmapped: {missing}")
    field = f.field
    images = {}
    for v in f.variables:
        img = sigma[v]
        if not isinstance(img, NcPoly):
            img = NcPoly.const(img, field)
        if img.field != field:
            raise FieldMismatchError(f"image of x{v} lives over {img.field}, not {field}")
        images[v] = img
    result = NcPoly.zero(field)
    cache = {(): NcPoly.one(field)}
    for w, c in f.items():
        result = result + _prefix_product(w, images, cache).scale(c)
    return result


def _prefix_product(w, images, cache):
    if w in cache:
        return cache[w]
    p = _prefix_product(w[:-1], images, cache) * images[w[-1]]
    cache[w] = p
    return p


def rename(f, mapping):
    """Relabel variables by an injective index map (variables outside the map are kept)."""
    return NcPoly._raw({tuple(mapping.get(i, i) for i in w): c for w, c in f._terms.items()}, f.field)


def razmyslov_transform(f, v):
    """Write f = sum f_i v g_i and return sum g_i v f_i."""
    out = {}
    for w, c in f._terms.items():
        if w.count(v) != 1:
            raise NotLinearError(f"term {w} has degree {w.count(v)} in x{v}; expected 1")
        k = w.index(v)
        nw = w[k + 1 :] + (v,) + w[:k]
        out[nw] = out.get(nw, 0) + c
    return NcPoly(out, f.field)


def multilinearize_with_map(f):
    """Full multilinearization plus the map original variable -> its fresh copies.

    Copy c (0-based) of variable v becomes variable ``v + c * D`` with D the
    largest variable index of f, so copy 0 keeps its name.
    """
    if not f.is_multihomogeneous():
        raise InvalidInputError("multilinearize needs a polynomial homogeneous in each variable")
    vs = f.variables
    if not vs:
        return f, {}
    D = max(vs)
    degs = {v: f.degree_in(v) for v in vs}
    copies = {v: [v + c * D for c in range(degs[v])] for v in vs}
    out = {}
    for w, coef in f._terms.items():
        positions = {v: [k for k, i in enumerate(w) if i == v] for v in vs}
        # each assignment of copies to occurrences is a permutation per variable
        per_var = [list(itertools.permutations(copies[v])) for v in vs]
        for choice in itertools.product(*per_var):
            nw = list(w)
            for v, perm in zip(vs, choice):
                for pos, newv in zip(positions[v], perm):
                    nw[pos] = newv
            nw = tuple(nw)
            out[nw] = out.get(nw, 0) + coef
    return NcPoly(out, f.field), copies


def multilinearize(f):
    return multilinearize_with_map(f)[0]


def polarization_factor(f):
    """prod(k_v!) over the degrees k_v of f's variables."""
    out = 1
    for v in f.variables:
        out *= factorial(f.degree_in(v))
    return out


def cyclotomic_poly_field(m):
    return QQ if m in (1, 2) else CyclotomicField(m)


def as_poly(x, field=QQ):
    if isinstance(x, NcPoly):
        return x
    return NcPoly.const(as_scalar(x), field)
