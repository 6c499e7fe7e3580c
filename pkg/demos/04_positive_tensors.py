"""
Positive decompositions of symmetric tensors
============================================

A symmetric tensor is only known through a few linear equations in its
entries.  We look for ``A = sum lambda_i u_i^(d)`` with ``lambda_i > 0`` and
``u_i`` in a set on the unit sphere.  With nonnegativity constraints this is
a completely positive decomposition.
"""

import numpy as np

from momrec import SymTensor, cp_set, hs_inner, recover_positive

# entry equations in 1-based multi-indices:  A113 + A123 - A223 = 2, ...
equations = [
    [((1, 1, 3), 1.0), ((1, 2, 3), 1.0), ((2, 2, 3), -1.0)],
    [((2, 2, 3), 1.0), ((3, 3, 3), 1.0), ((1, 1, 4), -1.0)],
    [((3, 3, 3), 1.0), ((1, 2, 4), 1.0), ((1, 3, 4), 1.0)],
    [((1, 1, 4), 1.0), ((2, 2, 4), -1.0), ((2, 3, 4), -1.0)],
]
b = [2.0, 10.0, 8.0, 1.0]

out = recover_positive(cp_set(4), equations, b, d=3, seed=0)
print("outcome:", out.outcome, "length:", out.decomposition.r, "residual:", out.residual)
for sign, lam, u in out.decomposition.terms():
    print(f"  {lam:9.4f} * {np.round(u, 4)}^(3)")

# the recovered tensor is a SymTensor; check one equation entry by entry
A = out.tensor
print("A113 + A123 - A223 =", A[(0, 0, 2)] + A[(0, 1, 2)] - A[(1, 1, 2)])

# a measurement tensor works just as well as an entry list
F = SymTensor.from_entries(4, 3, {(3, 3, 3): 1.0})
print("<F, A> = A333 =", hs_inner(F, A))
