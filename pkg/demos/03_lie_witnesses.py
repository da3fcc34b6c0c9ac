"""
Lie polynomials of small degree
===============================

Explicit preimages of trace-zero matrices, and the certificate used in
degree four.
"""

import json

from ncimage.analyzer import Budget
from ncimage.evaluator import evaluate
from ncimage.exactmat import Matrix
from ncimage.lie import lie4_analyze, lie_witness, sum_commutators_obstruction
from ncimage.parser import parse_poly

budget = Budget(seed=5)
target = Matrix.from_rows([[1, 2, 0], [0, 3, -1], [4, 0, -4]])

for text in ("[x2,x1]", "[x3,x2,x1] + 5*[x2,x3,x1]", "[x4,x3,x2,x1] - [x3,x4,x2,x1] + [x4,x2,x3,x1] - [x2,x4,x3,x1]"):
    f = parse_poly(text)
    args = lie_witness(f, target, budget)
    print(text, "->", evaluate(f, args, 3) == target)

f = parse_poly("[x4,x3,x2,x1] - [x3,x4,x2,x1] + [x4,x2,x3,x1] - [x2,x4,x3,x1]")
cert = lie4_analyze(f)
print(json.dumps(cert.to_dict()["primary"], indent=2))

# tr([x1,x2]^2) != 0, so [x1,x2]^2 is not a sum of commutators
rep = sum_commutators_obstruction(parse_poly("[x1,x2]"), 2, 2, budget)
print(rep.verdict, "at n =", rep.witness[0], "trace", rep.witness[2])
