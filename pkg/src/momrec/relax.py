"""Moment relaxations with generic SOS objectives and the order-k driver.

A problem asks for one nonnegative measure (``signed=False``) or a pair of
measures whose difference meets the functionals (``signed=True``), all
supported in ``K``::

    min  <R, w>            s.t.  <a_i, w> = b_i
    min  <R1, w> + <R2, v> s.t.  <a_i, w> - <a_i, v> = b_i

Each measure gets its own moment matrix, localizing blocks for the
inequalities and ideal rows for the equalities (and the sphere when
flagged).  :func:`run_hierarchy` raises the order until the minimiser has a
flat truncation and then extracts the atoms.
"""
from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field, replace
from math import ceil
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import extract as ex
from .momentlin import _encoder, localizing_size, stencil
from .polycore import Poly, Tms, basis_size, monomial_basis
from .sdp import LmiBlock, LmiProgram, SdpSolution, SolverOptions, Status, solve
from .semialg import SemialgebraicSet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MrpProblem:
    K: SemialgebraicSet
    functionals: tuple[tuple[Poly, float], ...]
    signed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "functionals", tuple((p, float(b)) for p, b in self.functionals))
        for p, _ in self.functionals:
            if p.n != self.K.n:
                raise ValueError("functional and set live in different dimensions")

    @property
    def n(self) -> int:
        return self.K.n

    @property
    def m(self) -> int:
        return len(self.functionals)

    @property
    def d(self) -> int:
        return max((p.deg for p, _ in self.functionals), default=0)

    @property
    def d1(self) -> int:
        return max(2 * ceil(self.d / 2), 2)

    @property
    def b(self) -> np.ndarray:
        return np.array([b for _, b in self.functionals], dtype=float)

    @property
    def polys(self) -> list[Poly]:
        return [p for p, _ in self.functionals]

    @property
    def n_measures(self) -> int:
        return 2 if self.signed else 1

    @property
    def k_min(self) -> int:
        return max(self.d1 // 2, self.K.degree)


# --------------------------------------------------------------------------
# generic objectives


@dataclass
class GenericObjective:
    grams: list[np.ndarray]
    polys: list[Poly]
    seed: Optional[int]
    n: int
    d1: int

    @property
    def G(self) -> np.ndarray:
        return self.grams[0]

    @property
    def R(self) -> Poly:
        return self.polys[0]


def gram_poly(P: np.ndarray, n: int, half: int) -> Poly:
    """``[x]_half^T P [x]_half`` as a polynomial."""
    basis = monomial_basis(n, half)
    enc = _encoder(n, 2 * half)
    pos = enc.positions((basis.array[:, None, :] + basis.array[None, :, :]).reshape(-1, n))
    coefs = np.zeros(basis_size(n, 2 * half))
    np.add.at(coefs, pos, P.ravel())
    return Poly.from_coefficients(coefs, n, 2 * half)


def generic_objective(n: int, d1: int, seed: Optional[int] = 0, count: int = 1,
                      G: Optional[Sequence[np.ndarray]] = None) -> GenericObjective:
    """``R = [x]^T G^T G [x]`` with standard normal square ``G`` (one per measure).

    Passing ``G`` fixes the factors instead of sampling them.
    """
    if d1 % 2:
        raise ValueError("the objective degree must be even")
    half = d1 // 2
    size = basis_size(n, half)
    rng = np.random.default_rng(seed)
    grams = []
    for i in range(count):
        if G is not None:
            Gi = np.asarray(G[i], dtype=float)
        else:
            while True:
                Gi = rng.standard_normal((size, size))
                if np.linalg.svd(Gi, compute_uv=False)[-1] > 1e-8:
                    break
        grams.append(Gi)
    polys = [gram_poly(Gi.T @ Gi, n, half) for Gi in grams]
    return GenericObjective(grams, polys, seed, n, d1)


# --------------------------------------------------------------------------
# assembly


def ideal_rows(h: Poly, k: int) -> sp.csr_matrix:
    """Rows ``<h x^alpha, w> = 0`` for every ``|alpha| <= 2k - 2 ceil(deg h / 2)``.

    These are exactly the distinct entries of the localizing matrix of ``h``.
    """
    n = h.n
    top = 2 * k - 2 * ceil(h.deg / 2)
    basis = monomial_basis(n, top)
    enc = _encoder(n, 2 * k)
    rows, cols, data = [], [], []
    for alpha, c in h.terms.items():
        rows.append(np.arange(len(basis)))
        cols.append(enc.positions(basis.array + np.asarray(alpha)))
        data.append(np.full(len(basis), c))
    mat = sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(len(basis), basis_size(n, 2 * k)))
    mat.sum_duplicates()
    return mat


def _shift(op: sp.spmatrix, offset: int, total: int) -> sp.csr_matrix:
    coo = op.tocoo()
    return sp.csr_matrix((coo.data, (coo.row, coo.col + offset)), shape=(coo.shape[0], total))


def _assemble(prob: MrpProblem, objectives: Sequence[Poly], k: int) -> LmiProgram:
    K = prob.K
    n = K.n
    if 2 * k < prob.d1 or k < K.degree:
        raise ValueError(f"order {k} is below the minimal order {prob.k_min}")
    L = basis_size(n, 2 * k)
    slots = prob.n_measures
    total = slots * L
    signs = [1.0, -1.0][:slots]

    c = np.zeros(total)
    for s, R in enumerate(objectives):
        c[s * L:(s + 1) * L] = R.coefficients(2 * k)

    F_parts, g_parts, labels = [], [], []
    func = np.zeros((prob.m, total))
    for i, (a, _) in enumerate(prob.functionals):
        coefs = a.coefficients(2 * k)
        for s in range(slots):
            func[i, s * L:(s + 1) * L] = signs[s] * coefs
    F_parts.append(sp.csr_matrix(func))
    g_parts.append(prob.b)
    labels += [f"functional {i}" for i in range(prob.m)]
    for s in range(slots):
        for e, h in enumerate(K.all_equalities):
            rows = ideal_rows(h, k)
            F_parts.append(_shift(rows, s * L, total))
            g_parts.append(np.zeros(rows.shape[0]))
            labels += [f"ideal {e} measure {s}"] * rows.shape[0]

    blocks = []
    for s in range(slots):
        st = stencil(Poly.constant(1.0, n), k)
        blocks.append(LmiBlock(_shift(st.operator, s * L, total), st.size,
                               label=f"moment measure {s}"))
        for j, gpoly in enumerate(K.inequalities):
            st = stencil(gpoly, k)
            blocks.append(LmiBlock(_shift(st.operator, s * L, total), st.size,
                                   label=f"localizing {j} measure {s}"))
    F = sp.vstack(F_parts).tocsr() if F_parts else sp.csr_matrix((0, total))
    return LmiProgram(c, F, np.concatenate(g_parts), blocks, labels)


def assemble_mrp(prob: MrpProblem, R: Poly, k: int) -> LmiProgram:
    """Order-``k`` moment relaxation for one nonnegative measure on ``K``."""
    if prob.signed:
        raise ValueError("use assemble_tensor_pair for signed problems")
    return _assemble(prob, [R], k)


def assemble_tensor_pair(prob: MrpProblem, R1: Poly, R2: Poly, k: int) -> LmiProgram:
    """Order-``k`` relaxation over ``(w, v)``; variables are ``w`` then ``v``."""
    from .semialg import homogeneity_check

    if not prob.K.sphere or not homogeneity_check(prob.K):
        raise ValueError("signed tensor recovery needs a sphere-flagged set of homogeneous constraints")
    return _assemble(replace(prob, signed=True), [R1, R2], k)


# --------------------------------------------------------------------------
# hierarchy driver


class Outcome(str, enum.Enum):
    RECOVERED = "recovered"
    NO_FLAT_TRUNCATION = "no_flat_truncation"
    INFEASIBLE = "infeasible"
    SOLVER_FAILURE = "solver_failure"

    def __str__(self) -> str:
        return self.value


@dataclass
class HierarchyOptions:
    rank_tol: float = ex.RANK_TOL
    atom_tol: float = ex.ATOM_TOL
    merge_tol: float = ex.MERGE_TOL
    zero_tol: float = 1e-7  # scaled by 1 + max|b|
    accept_gap: float = 1e-5  # inaccurate solves still go to the flatness test below this
    solver: SolverOptions = field(default_factory=SolverOptions)


@dataclass
class OrderRecord:
    k: int
    status: str
    phi: float
    psi: float
    duals: list[float]
    flat_t: Optional[int] = None
    ranks: list[tuple[int, int]] = field(default_factory=list)
    zero: list[bool] = field(default_factory=list)
    iterations: int = 0
    seconds: float = 0.0
    note: str = ""


@dataclass
class HierarchyReport:
    problem: MrpProblem
    objective: GenericObjective
    records: list[OrderRecord] = field(default_factory=list)
    outcome: Outcome = Outcome.NO_FLAT_TRUNCATION
    measures: list[ex.AtomicMeasure] = field(default_factory=list)
    functional_residual: float = np.inf
    seconds: float = 0.0
    solution: Optional[SdpSolution] = None

    @property
    def recovered(self) -> bool:
        return self.outcome is Outcome.RECOVERED

    @property
    def r(self) -> int:
        return sum(m.r for m in self.measures)

    @property
    def k(self) -> Optional[int]:
        return self.records[-1].k if self.records else None


def functional_residual(prob: MrpProblem, measures: Sequence[ex.AtomicMeasure]) -> float:
    signs = [1.0, -1.0]
    worst = 0.0
    for a, b in prob.functionals:
        val = sum(signs[s] * m.integrate(a) for s, m in enumerate(measures))
        worst = max(worst, abs(val - b))
    return worst


def _acceptable(sol: SdpSolution, opts: HierarchyOptions) -> bool:
    if sol.status is Status.OPTIMAL:
        return True
    if sol.status in (Status.MAX_ITER, Status.NUMERICAL_TROUBLE):
        return (np.isfinite(sol.gap) and sol.gap <= opts.accept_gap * (1 + abs(sol.phi))
                and sol.primal_residual <= 1e-6 and sol.block_min_eig >= -1e-6)
    return False


def run_hierarchy(
    prob: MrpProblem,
    seed: Optional[int] = 0,
    k_min: Optional[int] = None,
    k_max: Optional[int] = None,
    options: Optional[HierarchyOptions] = None,
    objective: Optional[GenericObjective] = None,
) -> HierarchyReport:
    """Solve relaxations of increasing order until a flat truncation appears."""
    opts = options or HierarchyOptions()
    K = prob.K
    n, d_K = K.n, K.degree
    kmin_allowed = prob.k_min
    k_min = kmin_allowed if k_min is None else k_min
    if k_min < kmin_allowed:
        raise ValueError(f"k_min must be at least {kmin_allowed}")
    k_max = k_min + 3 if k_max is None else k_max
    obj = objective or generic_objective(n, prob.d1, seed, count=prob.n_measures)
    report = HierarchyReport(prob, obj)
    zero_tol = opts.zero_tol * (1 + np.abs(prob.b).max(initial=0.0))
    t_min = max(d_K, prob.d1 // 2)
    start = time.perf_counter()
    any_solved = False
    for k in range(k_min, k_max + 1):
        tic = time.perf_counter()
        prog = _assemble(prob, obj.polys, k)
        sol = solve(prog, opts.solver)
        rec = OrderRecord(k, str(sol.status), sol.phi, sol.psi, sol.eq_duals[: prob.m].tolist(),
                          iterations=sol.iterations, note=sol.message)
        report.records.append(rec)
        report.solution = sol
        if sol.status is Status.INFEASIBLE:
            rec.seconds = time.perf_counter() - tic
            report.outcome = Outcome.INFEASIBLE
            break
        if not _acceptable(sol, opts):
            rec.seconds = time.perf_counter() - tic
            continue
        any_solved = True
        L = basis_size(n, 2 * k)
        ws = [Tms(n, 2 * k, sol.y[s * L:(s + 1) * L]) for s in range(prob.n_measures)]
        rec.zero = [abs(w.values[0]) <= zero_tol for w in ws]
        flat_t = None
        for t in range(t_min, k + 1):
            ranks = [(0, 0) if z else ex.flat_ranks(w, t, d_K, opts.rank_tol) for w, z in zip(ws, rec.zero)]
            if all(lo == hi for lo, hi in ranks):
                flat_t = t
                rec.ranks = ranks
                break
        if flat_t is None:
            rec.ranks = [(0, 0) if z else ex.flat_ranks(w, k, d_K, opts.rank_tol) for w, z in zip(ws, rec.zero)]
            rec.seconds = time.perf_counter() - tic
            continue
        rec.flat_t = flat_t
        try:
            measures = [
                ex.AtomicMeasure.zero(n) if z else ex.extract_atoms(
                    w, flat_t, K, rank=rk[1], rank_tol=opts.rank_tol, atom_tol=opts.atom_tol,
                    merge_tol=opts.merge_tol, seed=0 if seed is None else seed)
                for w, z, rk in zip(ws, rec.zero, rec.ranks)
            ]
        except ex.ExtractionError as err:
            rec.note = (rec.note + "; " if rec.note else "") + f"extraction failed: {err}"
            rec.seconds = time.perf_counter() - tic
            continue
        rec.seconds = time.perf_counter() - tic
        report.measures = measures
        report.functional_residual = functional_residual(prob, measures)
        report.outcome = Outcome.RECOVERED
        break
    else:
        report.outcome = Outcome.NO_FLAT_TRUNCATION if any_solved else Outcome.SOLVER_FAILURE
    report.seconds = time.perf_counter() - start
    return report
