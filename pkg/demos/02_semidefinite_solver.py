"""
The built-in semidefinite solver
================================

Programs read ``min c.y`` subject to ``F y = g`` and linear matrix
inequalities ``C_j + sum_a y_a A_j[a] >= 0``.
"""

import numpy as np
import scipy.sparse as sp

from momrec.sdp import LmiBlock, LmiProgram, dump_program, solve

# minimise y1 subject to [[1, y1], [y1, 1]] >= 0; the optimum is -1
off = np.array([[0.0, 1.0], [1.0, 0.0]])
prog = LmiProgram([1.0], None, [], [LmiBlock.from_matrices({0: off}, 1, constant=np.eye(2))])
sol = solve(prog)
print(sol.status, sol.phi, "dual bound", sol.psi)

# an equality pins two variables to a line; the 2x2 block keeps them in a disc
disc = LmiBlock.from_matrices({0: np.diag([1.0, -1.0]), 1: off}, 2, constant=np.eye(2))
prog = LmiProgram([1.0, 1.0], sp.csr_matrix([[1.0, -1.0]]), [0.0], [disc])
sol = solve(prog)
print(sol.status, np.round(sol.y, 6), "iterations:", sol.iterations)

# programs can be written in a line-oriented text format for debugging
print(dump_program(prog))
