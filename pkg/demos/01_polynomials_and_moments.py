"""
Polynomials, moment vectors and localizing matrices
===================================================

Monomials are ordered by degree, then lexicographically with x1 heaviest.
A truncated moment vector pairs linearly with polynomials, and moment and
localizing matrices are linear in that vector.
"""

import numpy as np

from momrec import Poly, atomic_tms, localizing_matrix, moment_matrix, monomial_basis, pair, variables

# the degree-2 basis in two variables
print(monomial_basis(2, 2).exponents)

x1, x2 = variables(2)
p = (x1 + 2 * x2) ** 2 - 1
print("p =", p)

# moments of a measure with two atoms on the unit circle
atoms = np.array([[1.0, 0.0], [0.6, 0.8]])
y = atomic_tms(atoms, [2.0, 1.0], 4)

# pairing a polynomial with y integrates it against the measure
print("<p, y> =", pair(p, y), " direct:", 2 * p(atoms[0]) + p(atoms[1]))

# the moment matrix has rank equal to the number of atoms
M = moment_matrix(y, 2)
print("rank M_2[y] =", np.linalg.matrix_rank(M, tol=1e-9))

# the sphere constraint localizes to zero on measures supported on the circle
L = localizing_matrix(Poly.sphere(2), y, 2)
print("max |L_sphere| =", np.abs(L).max())
