"""Recovery of atomic measures and K-decomposable symmetric tensors.

Moment problems ``<a_i, mu> = b_i`` with ``supp mu`` in a semialgebraic set
``K`` are relaxed into semidefinite programs over truncated moment
vectors, solved with a built-in interior point method, and the minimiser's
flat truncation is turned into atoms and weights.  The tensor front-ends
reduce ``<F_i, A> = b_i`` for symmetric ``A`` to the same machinery.
"""
from .polycore import (Poly, Tms, MonomialBasis, monomial_basis, basis_index, basis_monomial,
                       basis_size, pair, eval_poly, moment_vector, moment_vectors, atomic_tms,
                       variables)
from .semialg import SemialgebraicSet, membership_residual, homogeneity_check
from .momentlin import moment_matrix, localizing_matrix, stencil, LocalizingStencil
from .sdp import LmiBlock, LmiProgram, SdpSolution, SolverOptions, Status, solve, presolve
from .extract import AtomicMeasure, ExtractionError, numeric_rank, flat_degrees, extract_atoms
from .relax import (MrpProblem, GenericObjective, HierarchyOptions, HierarchyReport, Outcome,
                    generic_objective, assemble_mrp, assemble_tensor_pair, run_hierarchy)
from .tensorrec import (SymTensor, Htms, Decomposition, TensorRecovery, tensor_to_htms,
                        htms_to_tensor, measurement_poly, hs_inner, entry_equation,
                        equations_to_functionals, recover_positive, recover_general, reconstruct,
                        residual, cp_set, multiplicity)

__version__ = "0.1.0"
