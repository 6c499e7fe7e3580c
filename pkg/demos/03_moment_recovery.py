"""
Recovering an atomic measure from a few moments
===============================================

Six linear functionals of a measure are prescribed.  The measure lives on
the nonnegative part of the unit sphere cut out by x1 x2 = x2 x3 and
x1 x4 = x2 x3.  A
random sum-of-squares objective is minimised over the moment relaxation; a
flat truncation of the minimiser yields atoms and weights.
"""

import numpy as np

from momrec import MrpProblem, SemialgebraicSet, run_hierarchy, variables

x1, x2, x3, x4 = variables(4)
K = SemialgebraicSet(4, equalities=(x1 * x2 - x2 * x3, x2 * x3 - x1 * x4),
                     inequalities=(x1, x2, x3, x4), sphere=True)
functionals = [
    (x1 ** 3 * x2 - x1 ** 2 * x2 ** 2, 1.0),
    (x2 ** 3 * x3 - x2 ** 2 * x3 ** 2, 1.0),
    (x1 ** 4 - x2 ** 4, 2.0),
    (x3 ** 3 * x4 - x3 ** 2 * x4 ** 2, 1.0),
    (x1 * x4 ** 3 - x1 ** 2 * x4 ** 2, 1.0),
    (x3 ** 4 - x4 ** 4, 2.0),
]
prob = MrpProblem(K, functionals)
rep = run_hierarchy(prob, seed=0)

print("outcome:", rep.outcome, "at order", rep.k, "length", rep.r)
for lam, u in zip(rep.measures[0].weights, rep.measures[0].atoms):
    print(f"  weight {lam:9.4f}  atom {np.round(u, 4)}")
print("functional residual:", rep.functional_residual)
for rec in rep.records:
    print(f"  k = {rec.k}: {rec.status}, objective {rec.phi:.4f}, flat degree {rec.flat_t}, ranks {rec.ranks}")
