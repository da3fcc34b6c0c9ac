"""Constructions: central polynomials, trace carriers, and polynomials with prescribed images.

A trace carrier is a pair (c0, ci) with tr(a^i) c0(x) = ci(x, a) on M_n.
Carriers turn trace polynomials into noncommutative ones, which is how
every image construction in this module works.  The large polynomials are
returned as ``Circuit`` objects (unexpanded expression graphs).
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .analyzer import Budget, is_central, pure_trace_invariance_test, random_tuple
from .circuit import Apply, Circuit, Const, Prod, Sum, Var
from .errors import (
    InvalidInputError,
    PreconditionError,
    SynthesisFailure,
    TheoryViolation,
    UnsupportedDimension,
    WitnessNotFound,
)
from .evaluator import (
    CommPoly,
    TracePolyRep,
    elementary_symmetric,
    evaluate,
    grid_tensor,
    sym_to_trace,
    unit_grid,
)
from .exactmat import Matrix, bareiss, char_poly
from .freealg import (
    NcPoly,
    _perm_sign,
    capelli_poly,
    commutator,
    multilinearize,
    multilinearize_with_map,
    substitute,
)
from .scalars import QQ, div


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


# -- central polynomials ------------------------------------------------------


def builtin_central(n, central_file=None):
    """Multilinear central polynomial of M_n: x1 for n = 1, the polarized [x1,x2]^2 for n = 2."""
    if central_file is not None:
        return load_central(central_file).poly
    if n == 1:
        return NcPoly.var(1)
    if n == 2:
        c = commutator(NcPoly.var(1), NcPoly.var(2))
        return multilinearize(c * c)
    raise UnsupportedDimension(
        f"no built-in multilinear central polynomial for n={n}; supply a certified file "
        "(or use alternating_central for a structured one)"
    )


@dataclass
class CertifiedCentral:
    poly: NcPoly
    n: int
    t: int
    decision: object


def parse_central_text(text):
    """Header line {n, t, multilinear} (JSON) followed by the polynomial."""
    from .parser import parse_poly

    head, _, body = text.partition("\n")
    try:
        header = json.loads(head)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"central-polynomial header is not JSON: {exc}") from None
    for key in ("n", "t", "multilinear"):
        if key not in header:
            raise InvalidInputError(f"header lacks {key!r}")
    return header, parse_poly(body)


def load_central(path_or_text, budget=Budget()):
    """Load and re-certify a central polynomial; nothing in the file is trusted."""
    text = path_or_text
    if "\n" not in path_or_text:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    header, poly = parse_central_text(text)
    n, t = int(header["n"]), int(header["t"])
    if poly.varcount != t:
        raise InvalidInputError(f"header says t={t} but the polynomial uses {poly.varcount} variables")
    if bool(header["multilinear"]) != poly.is_multilinear():
        raise InvalidInputError("header multilinear flag does not match the polynomial")
    dec = is_central(poly, n, budget)
    if not dec.holds:
        raise InvalidInputError(f"polynomial is not central on M_{n}: {dec.reason or dec.verdict}")
    return CertifiedCentral(poly, n, t, dec)


def dump_central(poly, n):
    from .parser import poly_to_text

    header = {"n": n, "t": poly.varcount, "multilinear": poly.is_multilinear()}
    return json.dumps(header, sort_keys=True) + "\n" + poly_to_text(poly) + "\n"


def _regev_pattern(n):
    return "".join("x" * (2 * k + 1) + "y" * (2 * k + 1) for k in range(n))


@lru_cache(maxsize=None)
def _alternating_value(n):
    """Value of the double-alternating polynomial at (E; E), E the row-major matrix units.

    Dynamic program over (used x-units, used y-units, first row, current column);
    the sign of each permutation is accumulated from inversions as units are chosen.
    """
    N = n * n
    states = {(0, 0, None, None): 1}
    for ch in _regev_pattern(n):
        nxt = defaultdict(int)
        for (xm, ym, r, c), v in states.items():
            mask = xm if ch == "x" else ym
            choices = range(N) if c is None else range(c * n, c * n + n)
            for e in choices:
                if mask >> e & 1:
                    continue
                s = -v if bin(mask >> (e + 1)).count("1") % 2 else v
                nm = mask | (1 << e)
                r0 = e // n if r is None else r
                key = (nm, ym, r0, e % n) if ch == "x" else (xm, nm, r0, e % n)
                nxt[key] += s
        states = {k: v for k, v in nxt.items() if v}
    M = [[0] * n for _ in range(n)]
    for (_, _, r, c), v in states.items():
        M[r][c] += v
    return Matrix.from_rows(M)


class AlternatingCentral:
    """sum over sigma, tau of sgn(sigma) sgn(tau) w(x_sigma; y_tau), w the Regev word.

    Alternating in x_1..x_N and in y_1..y_N (N = n^2), so its value is
    det(coords x) det(coords y) times the value at the matrix-unit basis;
    that value commutes with all of GL_n and is a scalar kappa.
    """

    def __init__(self, n):
        self.n = n
        self.N = n * n
        self.arity = 2 * self.N
        M = _alternating_value(n)
        if not M.is_scalar():
            raise TheoryViolation("double-alternating value at the unit basis is not scalar")
        self.kappa = M[0, 0]
        if self.kappa == 0:
            raise TheoryViolation("double-alternating polynomial vanishes at the unit basis")

    def __repr__(self):
        return f"AlternatingCentral(n={self.n})"

    def basis_point(self):
        units = [Matrix.unit(self.n, i, j) for i in range(self.n) for j in range(self.n)]
        return units + units

    def _coord_det(self, mats):
        return bareiss([[m.e[i] for m in mats] for i in range(self.N)])[1]

    def evaluate(self, vals):
        N = self.N
        s = self._coord_det(vals[:N])
        if s == 0:
            return Matrix.zero(self.n)
        return Matrix.scalar(self.n, _norm(s * self._coord_det(vals[N:]) * self.kappa))

    def degree_with(self, degs):
        return sum(degs)

    def poly(self):
        if self.N > 4:
            raise InvalidInputError(f"expansion has ({self.N}!)^2 terms; evaluate structurally instead")
        N = self.N
        pattern = _regev_pattern(self.n)
        terms = {}
        for s in itertools.permutations(range(N)):
            for t in itertools.permutations(range(N)):
                xs, ys = iter(s), iter(t)
                w = tuple(next(xs) + 1 if ch == "x" else N + next(ys) + 1 for ch in pattern)
                terms[w] = terms.get(w, 0) + _perm_sign(s) * _perm_sign(t)
        return NcPoly(terms)

    def expand_with(self, args):
        return substitute(self.poly(), args)


class AlternatingCarrier:
    """c(x; y; a) = (1/n) sum_k c0(x_1, .., a x_k, .., x_N; y) = tr(a) c0(x; y)."""

    def __init__(self, central):
        self.central = central
        self.n = central.n
        self.arity = central.arity + 1

    def __repr__(self):
        return f"AlternatingCarrier(n={self.n})"

    def evaluate(self, vals):
        c0 = self.central
        N = c0.N
        xs, ys, a = list(vals[:N]), vals[N : 2 * N], vals[2 * N]
        dy = c0._coord_det(ys)
        if dy == 0:
            return Matrix.zero(self.n)
        total = 0
        for k in range(N):
            cols = xs[:k] + [a @ xs[k]] + xs[k + 1 :]
            total = total + c0._coord_det(cols)
        return Matrix.scalar(self.n, _norm(div(total * dy * c0.kappa, self.n)))

    def degree_with(self, degs):
        return sum(degs)

    def poly(self):
        base = self.central.poly()
        N = self.central.N
        a = NcPoly.var(2 * N + 1)
        out = NcPoly.zero()
        for k in range(1, N + 1):
            sigma = {v: NcPoly.var(v) for v in base.variables}
            sigma[k] = a * NcPoly.var(k)
            out = out + substitute(base, sigma)
        return out.scale(Fraction(1, self.n))

    def expand_with(self, args):
        return substitute(self.poly(), args)


# -- trace carriers ------------------------------------------------------------


def _c0_tensor(c0, n, t):
    return grid_tensor(c0, n, tuple(range(1, t + 1)))


def _polar_trace(akey, i):
    """sum over orderings of the a-copies of tr(e_{p1 q1} ... e_{pi qi})."""
    tr = 0
    for perm in itertools.permutations(range(i)):
        seq = [akey[p] for p in perm]
        if all(seq[m][1] == seq[m + 1][0] for m in range(i - 1)) and seq[-1][1] == seq[0][0]:
            tr += 1
    return tr


def _polarized_target(c0, n, i, t):
    """Grid of the full polarization of tr(a^i) c0(x): {(xkey + akey, r, c): value}."""
    units = [(p, q) for p in range(n) for q in range(n)]
    out = {}
    for key, cell in unit_grid(c0, n).items():
        for akey in itertools.product(units, repeat=i):
            tr = _polar_trace(akey, i)
            if tr:
                for (r, c), v in cell.items():
                    out[(key + akey, r, c)] = v * tr
    return out


@dataclass
class TraceCarrier:
    """Certified pair (c0, ci): tr(a^i) c0(x_1..x_t) = ci(x_1..x_t, a) on M_n, a = x_{t+1}."""

    n: int
    i: int
    c0: NcPoly
    ci: NcPoly
    t: int
    certificate: dict = field(default_factory=dict)

    def evaluate(self, xs, a):
        args = list(xs) + [a]
        return evaluate(self.ci, args, self.n)

    def node(self, xnodes, anode):
        return Apply(self.ci, list(xnodes) + [anode], label=f"c{self.i}")

    def c0_node(self, xnodes):
        return Apply(self.c0, list(xnodes), label="c0")

    def kappa_point(self):
        grid = unit_grid(self.c0, self.n)
        for key in sorted(grid):
            cell = grid[key]
            val = cell.get((0, 0), 0)
            if val != 0:
                pts = [Matrix.unit(self.n, p, q) for p, q in key]
                return pts, val
        raise TheoryViolation("c0 has no nonzero unit value but was certified central")

    def verify(self, budget=Budget(), samples=100):
        """Replay the certificate: exact polarized grid plus the x-grid at random a."""
        n, i, t = self.n, self.i, self.t
        c0_dec = is_central(self.c0, n, budget)
        if c0_dec.verdict != "yes_exact":
            raise SynthesisFailure(f"c0 is not certified central on M_{n}: {c0_dec.reason}")
        pol, copies = multilinearize_with_map(self.ci)
        a = t + 1
        if sorted(self.ci.variables) != list(range(1, t + 2)) and not self.ci.is_zero():
            raise SynthesisFailure("carrier uses unexpected variables")
        order = list(range(1, t + 1)) + copies.get(a, [])
        grid = unit_grid(pol, n)
        # unit_grid keys follow sorted variables; reorder to (x_1..x_t, a copies)
        vs = pol.variables
        perm = [vs.index(v) for v in order]
        got = {}
        for key, cell in grid.items():
            k2 = tuple(key[p] for p in perm)
            for (r, c), v in cell.items():
                got[(k2, r, c)] = v
        want = _polarized_target(self.c0, n, i, t)
        grid_ok = got == want
        rng = budget.rng("carrier")
        base = _c0_tensor(self.c0, n, t)
        random_ok = True
        for _ in range(samples):
            A = Matrix.random(n, rng, min(budget.bound, 99))
            lhs = base * (A**i).trace()
            rhs = grid_tensor(self.ci, n, tuple(range(1, t + 1)), {a: A})
            if not (lhs == rhs).all():
                random_ok = False
                break
        self.certificate = {
            "c0_central": c0_dec.verdict,
            "polarized_grid": grid_ok,
            "grid_points": n ** (2 * (t + i)),
            "random_a": samples,
            "random_a_ok": random_ok,
            "seed": budget.seed,
        }
        if not (grid_ok and random_ok):
            raise SynthesisFailure("carrier identity fails verification", unknowns=len(self.ci))
        return self.certificate

    @property
    def verified(self):
        return bool(self.certificate.get("polarized_grid") and self.certificate.get("random_a_ok"))

    def to_dict(self):
        def terms(p):
            return [[list(w), str(c)] for w, c in p.items()]

        return {"n": self.n, "i": self.i, "t": self.t, "c0": terms(self.c0), "ci": terms(self.ci)}

    @classmethod
    def from_dict(cls, d, budget=Budget()):
        def poly(ts):
            return NcPoly({tuple(w): Fraction(c) for w, c in ts})

        car = cls(int(d["n"]), int(d["i"]), poly(d["c0"]), poly(d["ci"]), int(d["t"]))
        car.verify(budget)
        return car


class StructuredCarrier:
    """Carrier built from AlternatingCarrier: tr(a^i) c0 = c1(x; y; a^i)."""

    def __init__(self, n, i=1):
        self.n = n
        self.i = i
        self.central = AlternatingCentral(n)
        self.c1 = AlternatingCarrier(self.central)
        self.t = self.central.arity
        self.certificate = {}

    def evaluate(self, xs, a):
        return self.c1.evaluate(list(xs) + [a**self.i])

    def node(self, xnodes, anode):
        arg = anode if self.i == 1 else Prod([anode] * self.i)
        return Apply(self.c1, list(xnodes) + [arg], label=f"c{self.i}")

    def c0_node(self, xnodes):
        return Apply(self.central, list(xnodes), label="c0")

    def kappa_point(self):
        return self.central.basis_point(), self.central.kappa

    def verify(self, budget=Budget(), samples=100):
        rng = budget.rng("structured-carrier")
        n = self.n
        ok = True
        for _ in range(samples):
            xs = random_tuple(rng, n, self.t, 9)
            A = Matrix.random(n, rng, 9)
            lhs = self.central.evaluate(xs) * (A**self.i).trace()
            if lhs != self.evaluate(xs, A):
                ok = False
                break
        self.certificate = {"random_samples": samples, "random_ok": ok, "seed": budget.seed}
        if not ok:
            raise SynthesisFailure("structured carrier fails verification")
        return self.certificate

    @property
    def verified(self):
        return bool(self.certificate.get("random_ok"))


def _rref_solve(columns, rhs, nunknowns, field_is_rational=True):
    """Solve sum_j A[r][j] u_j = b_r exactly; rows given as dicts.  Returns {j: value} or raises."""
    from sympy import QQ as SQQ
    from sympy.polys.matrices import DomainMatrix
    from sympy.polys.matrices.sdm import SDM

    rows = set(columns) | set(rhs)
    uniq = set()
    for r in rows:
        vec = tuple(sorted((k, v) for k, v in columns.get(r, {}).items() if v))
        uniq.add(vec + ((nunknowns, rhs.get(r, 0)),))
    d = {}
    for ri, vec in enumerate(sorted(uniq)):
        row = {k: SQQ(int(Fraction(v).numerator), int(Fraction(v).denominator)) for k, v in vec if v}
        if row:
            d[ri] = row
    shape = (len(uniq), nunknowns + 1)
    R, pivots = DomainMatrix.from_rep(SDM(d, shape, SQQ)).rref()
    pivots = list(pivots)
    rank = len([p for p in pivots if p < nunknowns])
    if nunknowns in pivots:
        raise SynthesisFailure(
            "no carrier exists in the ansatz space",
            rank=rank,
            residual_rank=len(pivots),
            unknowns=nunknowns,
        )
    sdm = R.rep.to_sdm() if hasattr(R.rep, "to_sdm") else R.rep
    sol = {}
    for ri, p in enumerate(pivots):
        v = sdm.get(ri, {}).get(nunknowns, 0)
        if v:
            sol[p] = _norm(Fraction(int(v.numerator), int(v.denominator)))
    return sol, rank


def _grid_columns(words, n, i, t):
    """Polarized unit-grid rows for each ansatz word (a = x_{t+1} replaced by its i copies)."""
    a = t + 1
    copies = [t + 1 + k for k in range(i)]
    acc = {}
    for col, w in enumerate(words):
        pos = [k for k, v in enumerate(w) if v == a]
        for perm in itertools.permutations(copies):
            nw = list(w)
            for p, v in zip(pos, perm):
                nw[p] = v
            d = len(nw)
            for chain in itertools.product(range(n), repeat=d + 1):
                key = [None] * d
                for m, v in enumerate(nw):
                    key[v - 1] = (chain[m], chain[m + 1])
                row = (tuple(key), chain[0], chain[-1])
                cell = acc.setdefault(row, {})
                cell[col] = cell.get(col, 0) + 1
    return acc


_CARRIER_CACHE = {}


def synthesize_trace_carrier(n, i, c0, budget=Budget()):
    """Find ci multilinear in x_1..x_t and of degree i in a = x_{t+1}; certify it."""
    if i < 1:
        raise InvalidInputError("power i must be positive")
    if not isinstance(c0, NcPoly) or not c0.is_multilinear():
        raise PreconditionError("c0 must be a multilinear NcPoly")
    if c0.field != QQ:
        raise PreconditionError("carrier synthesis works over the rationals")
    t = c0.varcount
    if c0.variables != tuple(range(1, t + 1)):
        raise PreconditionError("c0 must use exactly the variables x1..xt")
    dec = is_central(c0, n, budget)
    if dec.verdict != "yes_exact":
        raise PreconditionError(f"c0 is not central on M_{n} ({dec.reason or dec.verdict})")
    key = (n, i, tuple(c0.items()))
    if key in _CARRIER_CACHE:
        return _CARRIER_CACHE[key]
    a = t + 1
    letters = list(range(1, t + 1)) + [a] * i
    # descending order puts a-first words at the pivots (n = 1 gives a*x1)
    words = sorted(set(itertools.permutations(letters)), reverse=True)
    cols = _grid_columns(words, n, i, t)
    rhs = _polarized_target(c0, n, i, t)
    sol, rank = _rref_solve(cols, rhs, len(words))
    ci = NcPoly({words[j]: v for j, v in sol.items()})
    car = TraceCarrier(n, i, c0, ci, t)
    car.verify(budget)
    car.certificate.update({"unknowns": len(words), "rank": rank})
    _CARRIER_CACHE[key] = car
    return car


@dataclass
class CarrierSet:
    """c0 together with carriers for some powers; tr(M^k) falls back to c1(X, M^k)."""

    n: int
    carriers: dict

    @property
    def t(self):
        return self.carriers[1].t

    def c0_node(self, xnodes):
        return self.carriers[1].c0_node(xnodes)

    def trace_node(self, k, xnodes, mnode):
        """Node equal to tr(M^k) c0(X)."""
        if k in self.carriers:
            return self.carriers[k].node(xnodes, mnode)
        arg = mnode if k == 1 else Prod([mnode] * k)
        return self.carriers[1].node(xnodes, arg)

    def kappa_point(self):
        return self.carriers[1].kappa_point()


def default_carriers(n, budget=Budget(), powers=None):
    """Synthesized carriers over the built-in c0 for n <= 2, structured ones for n >= 3."""
    if n <= 2:
        c0 = builtin_central(n)
        ks = powers or list(range(1, n + 1))
        return CarrierSet(n, {k: synthesize_trace_carrier(n, k, c0, budget) for k in ks})
    car = StructuredCarrier(n, 1)
    car.verify(budget, samples=10)
    return CarrierSet(n, {1: car})


def _block(start, t):
    return [Var(v) for v in range(start, start + t)]


# -- GL_n image -----------------------------------------------------------------


class GLImagePoly(Circuit):
    """f = c(X, x) x with c = det(x) c0(X)^n; im f = GL_n plus 0."""

    def __init__(self, root, arity, n, blocks, carriers):
        super().__init__(root, arity, n, blocks, name="gl_image")
        self.carriers = carriers

    def witness(self, A):
        """Arguments with f(args) = A exactly, for invertible A."""
        if A.n != self.n:
            raise InvalidInputError("target has the wrong size")
        det = A.det()
        if det == 0:
            if A.is_zero():
                return self.zero_args()
            raise WitnessNotFound("singular nonzero matrices are not in the image")
        pts, kappa = self.carriers.kappa_point()
        D = det * kappa**self.n
        args = list(pts)
        args[0] = args[0] * D
        args.append(A / D)
        return args


def gl_image_poly(n, carriers=None, budget=Budget()):
    carriers = carriers or default_carriers(n, budget)
    t = carriers.t
    X = _block(1, t)
    x = Var(t + 1)
    det_rep = sym_to_trace(elementary_symmetric(n, n))
    c0 = carriers.c0_node(X)
    terms = []
    for e, coef in det_rep.P.terms.items():
        factors = []
        for k in range(1, n + 1):
            factors += [carriers.trace_node(k, X, x)] * e[k]
        m = sum(e[1:])
        factors += [c0] * (n - m)
        terms.append((coef, Prod(factors)))
    c = Sum(terms)
    root = Prod([c, x])
    return GLImagePoly(root, t + 1, n, {"X": list(range(1, t + 1)), "x": [t + 1]}, carriers)


# -- complements of trace-polynomial varieties ---------------------------------------


@dataclass
class VarietySpec:
    generators: list
    n: int
    scaling_closed: bool = True
    conjugation_closed: bool = True

    def __post_init__(self):
        if not self.generators:
            raise InvalidInputError("a variety needs at least one generator")
        for g in self.generators:
            if not isinstance(g, TracePolyRep):
                raise InvalidInputError(f"invalid spec: {g!r} is not a trace polynomial")
            if g.n != self.n:
                raise InvalidInputError("invalid spec: generator for a different dimension")
        if not self.scaling_closed:
            raise InvalidInputError("invalid spec: the construction needs a scaling-closed variety")

    def components(self):
        out = []
        for g in self.generators:
            out.extend(c for c in g.homogeneous_components() if not c.P.is_zero())
        return out

    def contains(self, A):
        return all(g.evaluate(A).is_zero() for g in self.generators)


@dataclass
class Witness:
    args: list
    mu: object


class VarietyComplementPoly(Circuit):
    def __init__(self, root, arity, n, blocks, spec, comps, exps, carriers, name="variety_complement"):
        super().__init__(root, arity, n, blocks, name=name)
        self.spec = spec
        self.comps = comps
        self.exps = exps
        self.carriers = carriers

    def witness(self, A):
        """Arguments with f(args) = mu A, mu != 0 (mu = 1 whenever a linear solve allows it)."""
        if A.is_zero():
            return Witness(self.zero_args(), 1)
        pts, kappa = self.carriers.kappa_point()
        t = self.carriers.t
        l = len(self.comps)
        for idx, (comp, (r, e)) in enumerate(zip(self.comps, self.exps)):
            P = comp.evaluate(A)
            if P.is_zero():
                continue
            B = _choose_b(P, e, div(1, kappa**r))
            args = self.zero_args()
            for k in range(t):
                args[idx * t + k] = pts[k]
            args[l * t] = A
            args[l * t + 1 + idx] = B
            mu = _norm(kappa**r * (P @ B**e).trace())
            return Witness(args, mu)
        raise WitnessNotFound("target lies in the variety; only 0 is attained there")


def _choose_b(P, e, want):
    """B with tr(P B^e) nonzero, equal to ``want`` when a linear solve permits."""
    n = P.n
    ident = Matrix.identity(n)
    trP = P.trace()
    for p in range(n):
        for q in range(n):
            if p != q and P[p, q] != 0:
                # (I + s e_qp)^e = I + e s e_qp
                s = div(want - trP, e * P[p, q])
                return ident + Matrix.unit(n, q, p) * s
    for p in range(n):
        if P[p, p] != 0:
            if e == 1:
                s = div(want - trP, P[p, p])
                return ident + Matrix.unit(n, p, p) * s
            for s in (1, 2, -2, 3):
                B = ident + Matrix.unit(n, p, p) * s
                if (P @ B**e).trace() != 0:
                    return B
    raise WitnessNotFound("could not find B with tr(P B^e) nonzero")


def variety_complement_poly(spec, carriers=None, budget=Budget(), name="variety_complement"):
    """Homogeneous f with im f = complement of V(spec) together with 0."""
    if not isinstance(spec, VarietySpec):
        raise InvalidInputError("invalid spec: expected a VarietySpec")
    n = spec.n
    carriers = carriers or default_carriers(n, budget)
    t = carriers.t
    comps = spec.components()
    l = len(comps)
    ds = [c.degree for c in comps]
    rs = [c.trace_degree + 1 for c in comps]
    d = max(di + ri * t for di, ri in zip(ds, rs))
    X = Var(l * t + 1)
    terms = []
    exps = []
    for idx, comp in enumerate(comps):
        Xi = _block(idx * t + 1, t)
        Y = Var(l * t + 2 + idx)
        e = d - ds[idx] - rs[idx] * t + 1
        exps.append((rs[idx], e))
        c0 = carriers.c0_node(Xi)
        Ye = Y if e == 1 else Prod([Y] * e)
        for mono, coef in comp.P.terms.items():
            factors = []
            for k in range(1, n + 1):
                factors += [carriers.trace_node(k, Xi, X)] * mono[k]
            m = sum(mono[1:])
            inner = Ye if mono[0] == 0 else Prod([X] * mono[0] + [Ye])
            factors.append(carriers.trace_node(1, Xi, inner))
            factors += [c0] * (rs[idx] - m - 1)
            terms.append((coef, Prod(factors)))
    root = Prod([Sum(terms), X])
    blocks = {f"X_{i + 1}": list(range(i * t + 1, (i + 1) * t + 1)) for i in range(l)}
    blocks["X"] = [l * t + 1]
    blocks.update({f"Y_{i + 1}": [l * t + 2 + i] for i in range(l)})
    return VarietyComplementPoly(root, l * t + 1 + l, n, blocks, spec, comps, exps, carriers, name)


# -- worked families --------------------------------------------------------------


def nilindex_spec(n, k):
    """Matrices with X^k = 0."""
    return VarietySpec([TracePolyRep.power(n, k)], n)


def distinct_eigs_spec(n, k):
    """Matrices with at most k distinct eigenvalues, cut out by p_k, ..., p_{n-1}."""
    if not 0 <= k <= n - 1:
        raise InvalidInputError("need 0 <= k <= n-1")
    gens = []
    for l in range(k, n):
        if l == 0:
            gens.append(TracePolyRep.power(n, 1))
            continue
        p = CommPoly(n)
        for subset in itertools.combinations(range(n), l + 1):
            q = CommPoly.const(n, 1)
            for a, b in itertools.combinations(subset, 2):
                diff = CommPoly.var(n, a) - CommPoly.var(n, b)
                q = q * diff * diff
            p = p + q
        gens.append(sym_to_trace(p))
    return VarietySpec(gens, n)


def idem_nilp_spec(n):
    """Scalar multiples of idempotents and nilpotents: zeros of tr(X^i) X - tr(X) X^i."""
    if n < 2:
        raise InvalidInputError("the family needs n >= 2")
    gens = []
    for i in range(2, n + 1):
        terms = {}
        e = [0] * (n + 1)
        e[0], e[i] = 1, 1
        terms[tuple(e)] = 1
        e = [0] * (n + 1)
        e[0], e[1] = i, 1
        terms[tuple(e)] = -1
        gens.append(TracePolyRep.from_terms(n, terms))
    return VarietySpec(gens, n)


def nilindex_poly(n, k, carriers=None, budget=Budget()):
    return variety_complement_poly(nilindex_spec(n, k), carriers, budget, name=f"nilindex_{k}")


def distinct_eigs_poly(n, k, carriers=None, budget=Budget()):
    return variety_complement_poly(distinct_eigs_spec(n, k), carriers, budget, name=f"distinct_eigs_{k}")


def idem_nilp_poly(n, carriers=None, budget=Budget()):
    return variety_complement_poly(idem_nilp_spec(n), carriers, budget, name="idem_nilp")


def is_scalar_idempotent(v):
    """v = lam E with E^2 = E (lam may be 0 only for v = 0)."""
    if v.is_zero():
        return True
    sq = v @ v
    k = next(i for i, x in enumerate(v.e) if x != 0)
    lam = div(sq.e[k], v.e[k])
    return lam != 0 and sq == v * lam


def discriminant(v):
    """prod_{a<b} (lam_a - lam_b)^2 over the eigenvalues of v; zero iff an eigenvalue repeats."""
    n = v.n
    if n == 1:
        return 1
    return _discriminant_rep(n).scalar(v)


@lru_cache(maxsize=None)
def _discriminant_rep(n):
    q = CommPoly.const(n, 1)
    for a, b in itertools.combinations(range(n), 2):
        diff = CommPoly.var(n, a) - CommPoly.var(n, b)
        q = q * diff * diff
    return sym_to_trace(q)


# -- Capelli construction ------------------------------------------------------------


class CapelliPoly(Circuit):
    def __init__(self, root, arity, n, blocks, carriers, c5):
        super().__init__(root, arity, n, blocks, name="minpoly_capelli")
        self.carriers = carriers
        self.c5 = c5

    def capelli_value(self, X, Y, Z):
        return evaluate(self.c5, {1: X, 2: Y, 3: Z}, self.n)

    def witness(self, X, budget=Budget(), attempts=20):
        """Arguments with a nonzero value mu X; needs min-poly degree >= 3."""
        t = self.carriers.t
        pts, kappa = self.carriers.kappa_point()
        rng = budget.rng("capelli")
        for _ in range(attempts):
            Y = Matrix.random(self.n, rng, 9)
            Z = Matrix.random(self.n, rng, 9)
            C = self.capelli_value(X, Y, Z)
            if C.is_zero():
                continue
            p, q = next((i // self.n, i % self.n) for i, v in enumerate(C.e) if v != 0)
            Y1 = Matrix.unit(self.n, q, p)
            args = list(pts) + [X, Y, Z, Y1]
            return Witness(args, _norm(kappa * C[p, q]))
        raise WitnessNotFound("no Y, Z found with C5(1, X, X^2, Y, Z) nonzero")


def minpoly_capelli_poly(n, carriers=None, budget=Budget()):
    """c0(X_1..X_t) tr(C5(1, X, X^2, Y, Z) Y1) X, realized as c1(X_1..X_t, C5 Y1) X."""
    carriers = carriers or default_carriers(n, budget)
    t = carriers.t
    X, Y, Z, Y1 = (Var(t + k) for k in range(1, 5))
    cap = capelli_poly(3)  # x1, x2, x3 alternating; y1 = x4, y2 = x5
    xv, yv, zv = NcPoly.var(1), NcPoly.var(2), NcPoly.var(3)
    c5 = substitute(cap, {1: NcPoly.one(), 2: xv, 3: xv * xv, 4: yv, 5: zv})
    inner = Prod([Apply(c5, [X, Y, Z], label="C5(1,X,X^2,Y,Z)"), Y1])
    root = Prod([carriers.trace_node(1, _block(1, t), inner), X])
    blocks = {"X_1": list(range(1, t + 1)), "X": [t + 1], "Y": [t + 2], "Z": [t + 3], "Y1": [t + 4]}
    return CapelliPoly(root, t + 4, n, blocks, carriers, c5)


def minpoly_degree(X):
    """Degree of the minimal polynomial: first k with I, X, ..., X^k dependent."""
    n = X.n
    vecs = [list(Matrix.identity(n).e)]
    P = Matrix.identity(n)
    for k in range(1, n + 1):
        P = P @ X
        vecs.append(list(P.e))
        if bareiss(vecs)[0] < len(vecs):
            return k
    return n


# -- standard open sets ----------------------------------------------------------------


def _restrict_to_diagonal(p, n):
    out = {}
    for e, c in p.terms.items():
        if any(e[i * n + j] for i in range(n) for j in range(n) if i != j):
            continue
        d = tuple(e[i * n + i] for i in range(n))
        out[d] = out.get(d, 0) + c
    return CommPoly(n, out)


def trace_form(p, n, budget=Budget()):
    """Pure trace polynomial equal to an invariant p in the n^2 entries (checked exactly on samples)."""
    inv = pure_trace_invariance_test(p, n, budget)
    if inv.verdict != "invariance_holds_whp":
        raise InvalidInputError("p is not conjugation invariant, so its zero set is not either")
    if p.terms.get((0,) * (n * n), 0) != 0:
        raise InvalidInputError("p has a constant term; its zero set is not closed under scaling")
    diag = _restrict_to_diagonal(p, n)
    if not diag.is_symmetric():
        raise InvalidInputError("restriction to diagonal matrices is not symmetric")
    rep = sym_to_trace(diag)
    rng = budget.rng("trace-form")
    for _ in range(budget.trials):
        X = Matrix.random(n, rng, 50)
        if rep.scalar(X) != p(list(X.e)):
            raise InvalidInputError("p is not a pure trace polynomial")
    return rep


def standard_open_poly(p, n, carriers=None, budget=Budget()):
    """f with im f = D(p) together with 0, for a conjugation- and scaling-closed D(p)."""
    rep = trace_form(p, n, budget)
    return variety_complement_poly(VarietySpec([rep], n), carriers, budget, name="standard_open")
