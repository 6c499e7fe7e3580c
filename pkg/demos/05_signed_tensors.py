"""
Signed decompositions
=====================

Any symmetric tensor is a difference of two positive combinations of
powers of sphere vectors.  The relaxation keeps one moment vector for each
part, so the same hierarchy recovers ``A = sum_+ - sum_-``.
"""

import numpy as np

from momrec import Decomposition, SemialgebraicSet, SymTensor, hs_inner, reconstruct, recover_general

rng = np.random.default_rng(3)
n, d, m = 3, 3, 6

# plant two positive terms and one negative term on the sphere
U = rng.standard_normal((3, n))
U /= np.linalg.norm(U, axis=1, keepdims=True)
planted = Decomposition(np.array([1.0, 1.0, -1.0]), np.array([1.0, 0.8, 0.6]), U)
A = reconstruct(planted, d)

# random measurements of the planted tensor
F = [SymTensor(n, d, rng.standard_normal(len(A.values))) for _ in range(m)]
b = [hs_inner(Fi, A) for Fi in F]

out = recover_general(SemialgebraicSet.unit_sphere(n), F, b, d, seed=0)
dec = out.decomposition
print("outcome:", out.outcome, "r =", dec.r, "positive terms:", dec.r1, "residual:", out.residual)
for sign, lam, u in dec.terms():
    print(f"  {'+' if sign > 0 else '-'} {lam:.4f} * {np.round(u, 4)}^(3)")
