"""
Polynomials with prescribed images
==================================

GL_2 plus zero, a variety complement, and the Capelli-type polynomial on
M_3.  Each witness is checked by exact evaluation.
"""

import random

from ncimage import synth
from ncimage.analyzer import Budget, random_tuple
from ncimage.exactmat import Matrix

budget = Budget(seed=3)
carriers = synth.default_carriers(2, budget)

f = synth.gl_image_poly(2, carriers, budget)
print("gl image polynomial:", f.describe())

rng = random.Random(1)
values = [f(random_tuple(rng, 2, f.arity, 9)) for _ in range(50)]
print("singular nonzero values:", sum(1 for v in values if not v.is_zero() and v.det() == 0))

A = Matrix.from_rows([[2, 1], [7, -3]])
w = f.witness(A)
print("witness hits the target:", f(w) == A)

# no nonzero value is a multiple of an idempotent or nilpotent
g = synth.idem_nilp_poly(2, carriers, budget)
t = Matrix.from_rows([[1, 1], [0, 3]])
wt = g.witness(t)
print("idem-nilp witness: mu =", wt.mu, g(wt.args) == t * wt.mu)

# on M_3 the Capelli construction sees the degree of the minimal polynomial
cars3 = synth.default_carriers(3, budget)
cap = synth.minpoly_capelli_poly(3, cars3, budget)
X = Matrix.from_rows([[0, 1, 0], [0, 0, 1], [2, -1, 3]])
wc = cap.witness(X, budget)
print("capelli on a cyclic X: mu =", wc.mu)
args = random_tuple(rng, 3, cap.arity, 5)
args[cap.blocks["X"][0] - 1] = Matrix.diag([1, 1, 0])
print("capelli on diag(1,1,0):", cap(args).is_zero())
