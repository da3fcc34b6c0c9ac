"""Decision procedures for polynomials evaluated on M_n.

Multilinear inputs are decided exactly on the matrix-unit grid.  Other
inputs fall back to random exact evaluation with entries from {-N..N};
every such verdict carries its Schwartz-Zippel failure bound.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import __version__
from .errors import InvalidInputError
from .evaluator import (
    CommPoly,
    eval_trace_power_jacobian,
    evaluate,
    grid_cell_is_scalar,
    grid_cost,
    trace_tuple,
    unit_grid,
    unit_tuple,
)
from .exactmat import (
    Matrix,
    is_diagonalizable,
    is_similar,
    jordan_data,
    nilpotent_partition,
    rank_of,
    rank_sequence,
    wj_matrix,
)
from .freealg import NcPoly, commutator
from .scalars import Cyc, as_scalar, conductor, div, format_scalar, rational_root, zeta

GRID_LIMIT = 2_000_000


@dataclass(frozen=True)
class Budget:
    """Explicit randomness: every randomized procedure draws from Random(seed)."""

    seed: int = 0
    trials: int = 30
    bound: int = 10**4
    retries: int = 3

    def rng(self, salt=""):
        return random.Random(f"{self.seed}:{salt}")

    def sample_set_size(self):
        return 2 * self.bound + 1


def random_tuple(rng, n, d, bound):
    return [Matrix.random(n, rng, bound) for _ in range(d)]


def _arity(f):
    return max(f.variables, default=0)


def sz_bound(degree, budget, trials):
    """Schwartz-Zippel: a nonzero polynomial of this degree survives each trial w.p. <= deg/|S|."""
    if degree <= 0:
        return 0.0
    return (min(1.0, degree / budget.sample_set_size())) ** trials


# -- reports ------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, Matrix):
        return x.to_literal()
    if isinstance(x, (Fraction, Cyc)):
        return format_scalar(x)
    if isinstance(x, NcPoly):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return x.to_dict()
    return x


def inputs_digest(*parts):
    text = "\x1f".join(json.dumps(_jsonable(p), sort_keys=True) for p in parts)
    return hashlib.sha256(text.encode()).hexdigest()


def make_report(operation, inputs, budget, verdict, witnesses=(), bounds=None, **extra):
    out = {
        "operation": operation,
        "inputs_digest": inputs_digest(*inputs),
        "seed": budget.seed if budget else None,
        "trials": budget.trials if budget else None,
        "verdict": verdict,
        "witnesses": _jsonable(list(witnesses)),
        "bounds": _jsonable(bounds or {}),
        "version": __version__,
    }
    for k, v in extra.items():
        out[k] = _jsonable(v)
    return out


@dataclass
class Decision:
    """Outcome of is_identity / is_central: 'yes_exact', 'yes_whp' or 'no'."""

    verdict: str
    method: str
    witness: list | None = None
    value: Matrix | None = None
    bound: float | None = None
    trials: int = 0
    reason: str = ""

    @property
    def holds(self):
        return self.verdict in ("yes_exact", "yes_whp")

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "method": self.method,
            "witness": _jsonable(self.witness) if self.witness is not None else None,
            "value": _jsonable(self.value) if self.value is not None else None,
            "failure_bound": self.bound,
            "trials": self.trials,
            "reason": self.reason,
        }


# -- identity and centrality ----------------------------------------------------


def _grid_ok(f, n):
    return f.is_multilinear() and grid_cost(f, n) <= GRID_LIMIT


def _grid_witness(f, n, key):
    args = {v: m for v, m in zip(f.variables, unit_tuple(key, n))}
    full = [args.get(i, Matrix.zero(n)) for i in range(1, _arity(f) + 1)]
    return full


def is_identity(f, n, budget=Budget()):
    if _grid_ok(f, n):
        grid = unit_grid(f, n)
        if not grid:
            return Decision("yes_exact", "unit_grid")
        key = min(grid)
        w = _grid_witness(f, n, key)
        return Decision("no", "unit_grid", w, evaluate(f, w, n))
    rng = budget.rng("identity")
    d = _arity(f)
    for trial in range(budget.trials):
        w = random_tuple(rng, n, d, budget.bound)
        v = evaluate(f, w, n)
        if not v.is_zero():
            return Decision("no", "random", w, v, trials=trial + 1)
    return Decision("yes_whp", "random", bound=sz_bound(f.degree, budget, budget.trials), trials=budget.trials)


def is_central(f, n, budget=Budget()):
    if _grid_ok(f, n):
        grid = unit_grid(f, n)
        if not grid:
            return Decision("no", "unit_grid", reason="polynomial identity")
        for key in sorted(grid):
            if not grid_cell_is_scalar(grid[key], n):
                w = _grid_witness(f, n, key)
                return Decision("no", "unit_grid", w, evaluate(f, w, n), reason="nonscalar value")
        return Decision("yes_exact", "unit_grid")
    return _central_random(lambda args: evaluate(f, args, n), _arity(f), f.degree, n, budget)


def _central_random(value_of, d, degree, n, budget, salt="central"):
    rng = budget.rng(salt)
    nonzero = False
    for trial in range(budget.trials):
        w = random_tuple(rng, n, d, budget.bound)
        v = value_of(w)
        if not v.is_scalar():
            return Decision("no", "random", w, v, trials=trial + 1, reason="nonscalar value")
        nonzero = nonzero or not v.is_zero()
    bound = sz_bound(degree, budget, budget.trials)
    if not nonzero:
        return Decision("no", "random", bound=bound, trials=budget.trials, reason="identity (whp)")
    return Decision("yes_whp", "random", bound=bound, trials=budget.trials)


@dataclass
class CentralIndex:
    j: int | None
    decisions: dict
    alarms: list = field(default_factory=list)

    def to_dict(self):
        return {
            "j": self.j,
            "decisions": {str(k): v.to_dict() for k, v in self.decisions.items()},
            "alarms": self.alarms,
        }


def central_index(f, n, jmax=None, budget=Budget()):
    """Smallest j <= jmax with f^j central; f itself is decided exactly when multilinear."""
    jmax = n if jmax is None else jmax
    if jmax < 1:
        raise InvalidInputError("jmax must be at least 1")
    decisions = {}
    d = _arity(f)
    for j in range(1, jmax + 1):
        if j == 1:
            dec = is_central(f, n, budget)
        else:
            dec = _central_random(
                lambda args, j=j: evaluate(f, args, n) ** j, d, f.degree * j, n, budget, salt=f"central:{j}"
            )
        decisions[j] = dec
        if dec.holds:
            alarms = []
            if n % j:
                alarms.append(f"theory violation: j={j} found but j does not divide n={n}")
            return CentralIndex(j, decisions, alarms)
    return CentralIndex(None, decisions)


# -- orbits ---------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSignature:
    """Fingerprint of a matrix invariant under conjugation and nonzero scaling."""

    kind: str
    partition: tuple = ()
    j: int | None = None
    alpha: tuple = ()
    jordan: tuple = ()

    def to_dict(self):
        return {
            "kind": self.kind,
            "partition": list(self.partition),
            "j": self.j,
            "alpha": [format_scalar(a) for a in self.alpha],
            "jordan": [list(self.jordan[0]), [list(p) for p in self.jordan[1]]] if self.jordan else [],
        }


def orbit_signature(a):
    n = a.n
    if a.is_zero():
        return OrbitSignature("zero")
    tr = trace_tuple(a)
    if all(t == 0 for t in tr):
        return OrbitSignature("nilpotent", partition=nilpotent_partition(rank_sequence(a), n))
    j = next(k for k, t in enumerate(tr, 1) if t != 0)
    tj = tr[j - 1]
    alpha = tuple(div(tr[k - 1] ** j, tj**k) for k in range(1, n + 1))
    return OrbitSignature("general", j=j, alpha=alpha, jordan=jordan_data(a))


def _ext_gcd_coeffs(ks):
    """Integers u with sum(u_k * k) = gcd(ks)."""
    g, coeffs = ks[0], [1]
    for k in ks[1:]:
        # extended Euclid on (g, k)
        old_r, r, old_s, s, old_t, t = g, k, 1, 0, 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        coeffs = [c * old_s for c in coeffs] + [old_t]
        g = old_r
    return g, coeffs


def _power(x, e):
    return x**e if e >= 0 else div(1, x ** (-e))


def scaling_power(a, b):
    """(g, rho) with b's power sums equal to lambda^k tr(a^k) iff lambda^g = rho; None if impossible."""
    ta, tb = trace_tuple(a), trace_tuple(b)
    K = [k for k, t in enumerate(ta, 1) if t != 0]
    if [k for k, t in enumerate(tb, 1) if t != 0] != K or not K:
        return None
    g, u = _ext_gcd_coeffs(K)
    rho = 1
    for k, uk in zip(K, u):
        rho = rho * _power(div(tb[k - 1], ta[k - 1]), uk)
    for k in K:
        if rho ** (k // g) != div(tb[k - 1], ta[k - 1]):
            return None
    return g, rho


def _root_candidates(rho, g):
    """All g-th roots of rho inside cyclotomic fields, or None when rho is no rational multiple of a root of unity."""
    if not isinstance(rho, Cyc):
        q = Fraction(rho)
        base, M, s = abs(q), 2, (0 if q > 0 else 1)
    else:
        m = conductor(rho)
        M = m if m % 2 == 0 else 2 * m
        found = None
        for s in range(M):
            q = rho * zeta(M, -s)
            if not isinstance(q, Cyc):
                found = (Fraction(q), s)
                break
        if found is None:
            return None
        q, s = found
        if q < 0:
            q, s = -q, s + M // 2
        base = q
    r = rational_root(base, g)
    if r is None:
        return None
    return [r * zeta(M * g, s + M * k) for k in range(g)]


@dataclass
class ScalarSimilarity:
    lam: object
    diagnostic: str = ""

    def __bool__(self):
        return self.lam is not None


def similar_mod_scalar(a, b):
    """A scalar lam in a cyclotomic field with b similar to lam * a, else lam = None plus a diagnostic."""
    if a.n != b.n:
        return ScalarSimilarity(None, "dimension mismatch")
    sa, sb = orbit_signature(a), orbit_signature(b)
    if sa.kind != sb.kind:
        return ScalarSimilarity(None, f"kinds differ: {sa.kind} vs {sb.kind}")
    if sa.kind == "zero":
        return ScalarSimilarity(1)
    if sa.kind == "nilpotent":
        if sa.partition == sb.partition:
            return ScalarSimilarity(1)
        return ScalarSimilarity(None, "Jordan partitions differ")
    sp = scaling_power(a, b)
    if sp is None:
        return ScalarSimilarity(None, "trace ratios admit no common scalar")
    g, rho = sp
    cands = _root_candidates(rho, g)
    if cands is None:
        return ScalarSimilarity(None, f"lambda^{g} = {format_scalar(rho)} has no root in a cyclotomic field")
    for lam in cands:
        if is_similar(a * lam, b):
            return ScalarSimilarity(lam)
    return ScalarSimilarity(None, "no candidate scalar gives a similar matrix")


def in_scaled_orbit(a, b):
    """Exact test of b in a^~ (some nonzero lam, possibly irrational, with b ~ lam a).

    Returns None when undecided: lam irrational and a not diagonalizable.
    """
    if a.n != b.n:
        return False
    if b.is_zero() or a.is_zero():
        return a.is_zero() and b.is_zero()
    res = similar_mod_scalar(a, b)
    if res:
        return True
    sa = orbit_signature(a)
    if sa.kind == "nilpotent" or orbit_signature(b).kind != sa.kind:
        return False
    sp = scaling_power(a, b)
    if sp is None:
        return False
    if _root_candidates(sp[1], sp[0]) is not None:
        return False  # every candidate lam was tried exactly
    # power sums match those of lam * a, so char polys agree; for diagonalizable a
    # similarity is then equivalent to b being diagonalizable
    if is_diagonalizable(a):
        return is_diagonalizable(b)
    return None


def is_nilpotent(a):
    return all(t == 0 for t in trace_tuple(a))


# -- finiteness -------------------------------------------------------------------


@dataclass
class FinitenessReport:
    verdict: str
    j: int | None
    orbit_evidence: list
    wj_check: bool | None
    seed: int
    trials: int
    central: CentralIndex | None = None
    alarms: list = field(default_factory=list)
    nilpotent_check: bool | None = None

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "j": self.j,
            "orbit_evidence": [{"signature": s.to_dict(), "count": c} for s, c in self.orbit_evidence],
            "wj_check": self.wj_check,
            "nilpotent_check": self.nilpotent_check,
            "seed": self.seed,
            "trials": self.trials,
            "central_index": self.central.to_dict() if self.central else None,
            "alarms": self.alarms,
        }


def classify_finiteness(f, n, budget=Budget(), jmax=None, samples=None, max_signatures=4):
    """Finite image modulo scaling iff some power of f is central; classify accordingly."""
    ci = central_index(f, n, jmax, budget)
    samples = budget.trials if samples is None else samples
    rng = budget.rng("finiteness")
    d = _arity(f)
    counts = {}
    alarms = list(ci.alarms)
    wj_ok, nil_ok = None, None
    if ci.j is not None and n % ci.j == 0:
        wj = wj_matrix(n, ci.j)
        wj_ok, nil_ok = True, True
    for _ in range(samples):
        v = evaluate(f, random_tuple(rng, n, d, budget.bound), n)
        sig = orbit_signature(v)
        counts[sig] = counts.get(sig, 0) + 1
        if wj_ok is not None:
            if sig.kind == "general" and in_scaled_orbit(wj, v) is not True:
                wj_ok = False
            for m in range(ci.j, 2 * ci.j + 1):
                vm = v**m
                if not vm.is_zero() and is_nilpotent(vm):
                    nil_ok = False
    evidence = sorted(counts.items(), key=lambda kv: -kv[1])
    if ci.j is not None:
        verdict = "finite"
        if wj_ok is False or nil_ok is False:
            alarms.append("theory violation: sampled value outside the w_j orbit of a power-central polynomial")
    elif len(counts) > max_signatures:
        verdict = "not_finite"
    else:
        verdict = "inconclusive"
    return FinitenessReport(verdict, ci.j, evidence, wj_ok, budget.seed, samples, ci, alarms, nil_ok)


# -- density ------------------------------------------------------------------------


@dataclass
class DensityReport:
    trace_vanishes: bool
    jacobian_rank: int | None
    target_dim: int
    verdict: str
    seed: int
    point: list | None
    identity: Decision | None = None
    ranks_tried: list = field(default_factory=list)
    lift_evidence: dict | None = None
    trace_method: str = ""

    def to_dict(self):
        return {
            "trace_vanishes": self.trace_vanishes,
            "trace_method": self.trace_method,
            "jacobian_rank": self.jacobian_rank,
            "target_dim": self.target_dim,
            "verdict": self.verdict,
            "seed": self.seed,
            "point": _jsonable(self.point) if self.point else None,
            "ranks_tried": self.ranks_tried,
            "identity": self.identity.to_dict() if self.identity else None,
            "lift_evidence": self.lift_evidence,
            "note": "density verdicts are not claims about image equality",
        }


def trace_vanishes(f, n, budget=Budget()):
    """(vanishes, method) for the question tr f == 0 on M_n."""
    if _grid_ok(f, n):
        grid = unit_grid(f, n)
        for cell in grid.values():
            if sum((v for (r, c), v in cell.items() if r == c), 0) != 0:
                return False, "unit_grid"
        return True, "unit_grid"
    rng = budget.rng("trace")
    d = _arity(f)
    for _ in range(budget.trials):
        if evaluate(f, random_tuple(rng, n, d, budget.bound), n).trace() != 0:
            return False, "random"
    return True, "random"


def density_report(f, n, budget=Budget(), lift=False):
    ident = is_identity(f, n, budget)
    tv, method = trace_vanishes(f, n, budget)
    target = n - 1 if tv else n
    if ident.holds:
        return DensityReport(tv, 0, target, "not_certified", budget.seed, None, ident, trace_method=method)
    ks = list(range(2 if tv else 1, n + 1))
    d = max(_arity(f), 1)
    rng = budget.rng("density")
    ranks = []
    point = None
    verdict = "not_certified"
    best = 0
    if not ks:
        verdict, best = "dense_in_Mn0", 0
    else:
        for _ in range(1 + budget.retries):
            point = random_tuple(rng, n, d, budget.bound)
            r = rank_of(eval_trace_power_jacobian(f, point, ks))
            ranks.append(r)
            best = max(best, r)
            if r == len(ks):
                verdict = "dense_in_Mn0" if tv else "dense_in_Mn"
                break
    lift_ev = None
    if lift and n > 1:
        sub = density_report(f, n - 1, budget)
        lift_ev = {
            "n": n - 1,
            "verdict": sub.verdict,
            "note": "dense trace-zero part on M_{n-1} embedded in the corner supports the lift to M_n",
        }
    return DensityReport(tv, best, target, verdict, budget.seed, point, ident, ranks, lift_ev, method)


# -- invariance ------------------------------------------------------------------------


@dataclass
class InvarianceResult:
    verdict: str
    counterexample: tuple | None = None
    trials: int = 0

    def to_dict(self):
        return {"verdict": self.verdict, "counterexample": _jsonable(self.counterexample), "trials": self.trials}


def _entries_poly(p, X):
    return p(list(X.e))


def pure_trace_invariance_test(p, n, budget=Budget()):
    """Sample p(S X S^-1) = p(X); p is a CommPoly in the n^2 entries, row-major."""
    if not isinstance(p, CommPoly) or p.nvars != n * n:
        raise InvalidInputError(f"expected a commutative polynomial in {n * n} variables")
    rng = budget.rng("invariance")
    bound = min(budget.bound, 50)
    for trial in range(budget.trials):
        X = Matrix.random(n, rng, bound)
        S = Matrix.random(n, rng, bound)
        while S.det() == 0:
            S = Matrix.random(n, rng, bound)
        Y = S @ X @ S.inverse()
        if _entries_poly(p, Y) != _entries_poly(p, X):
            return InvarianceResult("counterexample", (S, X), trial + 1)
    return InvarianceResult("invariance_holds_whp", None, budget.trials)


def entry_poly(n, i, j):
    """The coordinate function X -> X[i, j] (0-based) as a CommPoly."""
    return CommPoly.var(n * n, i * n + j)


def trace_poly(n):
    out = CommPoly(n * n)
    for i in range(n):
        out = out + entry_poly(n, i, i)
    return out


def det_poly(n):
    import itertools

    from .freealg import _perm_sign

    terms = {}
    for perm in itertools.permutations(range(n)):
        e = [0] * (n * n)
        for i, j in enumerate(perm):
            e[i * n + j] += 1
        terms[tuple(e)] = _perm_sign(perm)
    return CommPoly(n * n, terms)


def commutes_with_everything(v):
    return v.is_scalar()


def bracket_with_new(f):
    """[f, x_{d+1}] used to phrase centrality as an identity question."""
    return commutator(f, NcPoly.var(_arity(f) + 1, f.field))
