"""
The commutator on 2x2 and 3x3 matrices
======================================

Values of [x1, x2] on M_2, the scaled orbit of its cube, and the
Jacobian-rank argument for density.
"""

import random

from ncimage.analyzer import Budget, central_index, classify_finiteness, density_report, in_scaled_orbit
from ncimage.evaluator import evaluate
from ncimage.exactmat import Matrix, wj_matrix
from ncimage.parser import parse_poly

budget = Budget(seed=7)
f = parse_poly("[x1,x2]")

# [x1,x2]^2 is central on M_2, so the commutator is 2-central
print("central index on M_2:", central_index(f, 2, None, budget).j)

rep = classify_finiteness(f, 2, budget, samples=40)
print("finiteness:", rep.verdict, "j =", rep.j)

# every nonzero value of the cube is lambda * diag(1,-1) up to similarity
rng = random.Random(0)
w = wj_matrix(2, 2)
cube = f * f * f
hits = 0
for _ in range(200):
    v = evaluate(cube, [Matrix.random(2, rng, 30) for _ in range(2)])
    hits += v.is_zero() or in_scaled_orbit(w, v)
print("cube values in the orbit of diag(1,-1):", hits, "/ 200")

# exact Jacobian rank of the trace map
for n in (2, 3):
    d = density_report(f, n, budget)
    print(f"n={n}:", d.verdict, "rank", d.jacobian_rank)
