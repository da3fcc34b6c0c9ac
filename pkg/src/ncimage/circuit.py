"""Noncommutative polynomials kept as unexpanded expression graphs.

Products of carrier polynomials have far too many words to expand, but
they evaluate cheaply when each factor is evaluated once.  A ``Circuit``
is a polynomial in the free algebra represented by such a graph; it can
always be expanded in principle, and ``expand`` does so on request.
"""

from __future__ import annotations

from .errors import InvalidInputError
from .exactmat import Matrix
from .freealg import NcPoly, substitute


class Node:
    def __add__(self, other):
        return Sum([(1, self), (1, _lift(other))])

    def __sub__(self, other):
        return Sum([(1, self), (-1, _lift(other))])

    def __mul__(self, other):
        if isinstance(other, Node):
            return Prod([self, other])
        return Sum([(other, self)])

    def __rmul__(self, c):
        return Sum([(c, self)])

    def __pow__(self, k):
        if k == 0:
            return Const(1)
        return Prod([self] * k)

    def value(self, env, n, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self._value(env, n, memo)
        return memo[key]


def _lift(x):
    return x if isinstance(x, Node) else Const(x)


class Var(Node):
    def __init__(self, v):
        self.v = v

    def _value(self, env, n, memo):
        return env[self.v]

    def variables(self):
        return {self.v}

    def degree(self):
        return 1

    def expand(self, cache):
        return NcPoly.var(self.v)

    def describe(self):
        return f"x{self.v}"


class Const(Node):
    def __init__(self, c):
        self.c = c

    def _value(self, env, n, memo):
        return Matrix.scalar(n, self.c)

    def variables(self):
        return set()

    def degree(self):
        return 0

    def expand(self, cache):
        return NcPoly.const(self.c)

    def describe(self):
        return str(self.c)


class Sum(Node):
    def __init__(self, terms):
        self.terms = [(c, t) for c, t in terms if c != 0]

    def _value(self, env, n, memo):
        out = Matrix.zero(n)
        for c, t in self.terms:
            out = out + t.value(env, n, memo) * c
        return out

    def variables(self):
        return set().union(*(t.variables() for _, t in self.terms)) if self.terms else set()

    def degree(self):
        degs = {t.degree() for _, t in self.terms}
        if len(degs) == 1 and None not in degs:
            return degs.pop()
        return None if self.terms else 0

    def expand(self, cache):
        out = NcPoly.zero()
        for c, t in self.terms:
            out = out + _expand(t, cache).scale(c)
        return out

    def describe(self):
        parts = []
        for c, t in self.terms:
            parts.append(t.describe() if c == 1 else f"{c}*({t.describe()})")
        return " + ".join(parts) if parts else "0"


class Prod(Node):
    def __init__(self, factors):
        self.factors = list(factors)

    def _value(self, env, n, memo):
        out = Matrix.identity(n)
        for f in self.factors:
            out = out @ f.value(env, n, memo)
        return out

    def variables(self):
        return set().union(*(f.variables() for f in self.factors)) if self.factors else set()

    def degree(self):
        degs = [f.degree() for f in self.factors]
        return None if None in degs else sum(degs)

    def expand(self, cache):
        out = NcPoly.one()
        for f in self.factors:
            out = out * _expand(f, cache)
        return out

    def describe(self):
        return "*".join(f"({f.describe()})" for f in self.factors)


class Apply(Node):
    """fn(args[0], ..., args[k-1]) where fn is an NcPoly in x1..xk or a structured polynomial."""

    def __init__(self, fn, args, label=None):
        self.fn = fn
        self.args = list(args)
        self.label = label
        if isinstance(fn, NcPoly) and fn.variables and max(fn.variables) > len(self.args):
            raise InvalidInputError("not enough arguments for polynomial")

    def _value(self, env, n, memo):
        vals = [a.value(env, n, memo) for a in self.args]
        if isinstance(self.fn, NcPoly):
            from .evaluator import evaluate

            return evaluate(self.fn, vals, n)
        return self.fn.evaluate(vals)

    def variables(self):
        return set().union(*(a.variables() for a in self.args)) if self.args else set()

    def degree(self):
        degs = [a.degree() for a in self.args]
        if None in degs:
            return None
        if isinstance(self.fn, NcPoly):
            totals = {sum(degs[i - 1] for i in w) for w, _ in self.fn.items()}
            return totals.pop() if len(totals) == 1 else None
        return self.fn.degree_with(degs)

    def expand(self, cache):
        args = {i + 1: _expand(a, cache) for i, a in enumerate(self.args)}
        if isinstance(self.fn, NcPoly):
            return substitute(self.fn, {v: args[v] for v in self.fn.variables})
        return self.fn.expand_with(args)

    def describe(self):
        name = self.label or ("p" if isinstance(self.fn, NcPoly) else type(self.fn).__name__)
        return f"{name}(" + ", ".join(a.describe() for a in self.args) + ")"


def _expand(node, cache):
    key = id(node)
    if key not in cache:
        cache[key] = node.expand(cache)
    return cache[key]


class Circuit:
    """A polynomial f(x_1, ..., x_N) given by an expression graph."""

    def __init__(self, root, arity, n, blocks=None, name="f"):
        self.root = root
        self.arity = arity
        self.n = n
        self.blocks = blocks or {}
        self.name = name

    def evaluate(self, args):
        if isinstance(args, dict):
            env = dict(args)
        else:
            args = list(args)
            if len(args) != self.arity:
                raise InvalidInputError(f"{self.name} takes {self.arity} arguments, got {len(args)}")
            env = {i + 1: a for i, a in enumerate(args)}
        for v in range(1, self.arity + 1):
            env.setdefault(v, Matrix.zero(self.n))
        return self.root.value(env, self.n, {})

    __call__ = evaluate

    @property
    def variables(self):
        return tuple(sorted(self.root.variables()))

    @property
    def degree(self):
        """Total degree when homogeneous, None otherwise."""
        return self.root.degree()

    def is_homogeneous(self):
        return self.root.degree() is not None

    def expand(self):
        return _expand(self.root, {})

    def describe(self):
        return self.root.describe()

    def to_dict(self):
        return {
            "name": self.name,
            "n": self.n,
            "arity": self.arity,
            "degree": self.degree,
            "blocks": {k: list(v) for k, v in self.blocks.items()},
            "expression": self.describe(),
        }

    def zero_args(self):
        return [Matrix.zero(self.n) for _ in range(self.arity)]
