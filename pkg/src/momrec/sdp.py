"""A small dense primal-dual interior point solver for moment-type LMIs.

Programs have the form::

    minimize    c @ y
    subject to  F @ y == g
                C_j + sum_a y[a] * A_j[a]  is PSD   for every block j

with ``y`` free.  :func:`solve` removes the equality constraints by an
explicit null-space parametrisation ``y = y0 + N z``, and hands the
remaining dual-form SDP to a path-following method with the HKM search
direction and Mehrotra's predictor-corrector.  Block directions that the
equalities force into every kernel are projected out first (a linear
facial reduction), which restores strict feasibility for the
ideal-constrained moment matrices.  Everything is dense, which is the
right trade-off for relaxations with at most a few hundred rows per block.

Non-optimal outcomes are reported through :attr:`SdpSolution.status`
instead of exceptions; only malformed input raises.
"""
from __future__ import annotations

import enum
import io
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITER = "MaxIter"
    NUMERICAL_TROUBLE = "NumericalTrouble"

    def __str__(self) -> str:
        return self.value


@dataclass
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    min_step: float = 1e-10
    infeas_tol: float = 1e-8
    rank_tol: float = 1e-10
    use_faces: bool = True
    verbose: bool = False


@dataclass
class LmiBlock:
    """One PSD constraint ``C + mat(operator @ y) >= 0``.

    ``operator`` has shape ``(size*size, m_y)``; column ``a`` is the
    row-major vectorisation of the symmetric coefficient matrix of ``y[a]``.
    """

    operator: sp.csr_matrix
    size: int
    constant: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        self.operator = sp.csr_matrix(self.operator)
        if self.operator.shape[0] != self.size * self.size:
            raise ValueError("block operator rows must equal size**2")
        if self.constant is not None:
            self.constant = np.asarray(self.constant, dtype=float)
            if self.constant.shape != (self.size, self.size):
                raise ValueError("constant term has the wrong shape")

    @classmethod
    def from_matrices(cls, mats: dict, m_y: int, constant=None, label: str = "") -> "LmiBlock":
        """Build from ``{alpha_index: symmetric matrix}``."""
        size = None
        rows, cols, data = [], [], []
        for a, mat in mats.items():
            mat = np.asarray(mat, dtype=float)
            size = mat.shape[0] if size is None else size
            nz = np.flatnonzero(mat.ravel())
            rows.append(nz)
            cols.append(np.full(len(nz), a))
            data.append(mat.ravel()[nz])
        if size is None:
            size = np.asarray(constant).shape[0]
        op = sp.csr_matrix(
            (np.concatenate(data) if data else [], (np.concatenate(rows) if rows else [],
                                                     np.concatenate(cols) if cols else [])),
            shape=(size * size, m_y),
        )
        return cls(op, size, constant, label=label)

    def coefficient(self, a: int) -> np.ndarray:
        return self.operator[:, a].toarray().reshape(self.size, self.size)

    def value(self, y: np.ndarray) -> np.ndarray:
        out = (self.operator @ y).reshape(self.size, self.size)
        if self.constant is not None:
            out = out + self.constant
        return out


@dataclass
class LmiProgram:
    c: np.ndarray
    F: sp.csr_matrix
    g: np.ndarray
    blocks: list[LmiBlock] = field(default_factory=list)
    row_labels: Optional[list[str]] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        m_y = len(self.c)
        if self.F is None:
            self.F = sp.csr_matrix((0, m_y))
        self.F = sp.csr_matrix(self.F)
        self.g = np.asarray(self.g, dtype=float).ravel()
        if self.F.shape[1] != m_y or self.F.shape[0] != len(self.g):
            raise ValueError("equality data has inconsistent shapes")
        for blk in self.blocks:
            if blk.operator.shape[1] != m_y:
                raise ValueError(f"block {blk.label!r} acts on the wrong number of variables")

    @property
    def m_y(self) -> int:
        return len(self.c)

    @property
    def n_rows(self) -> int:
        return self.F.shape[0]


@dataclass
class SdpSolution:
    status: Status
    y: np.ndarray
    phi: float
    psi: float
    eq_duals: np.ndarray
    block_duals: list[np.ndarray]
    gap: float
    primal_residual: float
    dual_residual: float
    block_min_eig: float
    iterations: int = 0
    presolve_rows: tuple[int, int] = (0, 0)
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


# --------------------------------------------------------------------------
# presolve


@dataclass
class PresolveInfo:
    kept_rows: np.ndarray
    raw_rows: int
    consistent: bool
    message: str = ""


def presolve(prog: LmiProgram) -> tuple[LmiProgram, PresolveInfo]:
    """Drop zero and duplicate equality rows; flag contradictory duplicates.

    Rows are compared after scaling by their first nonzero coefficient, so
    proportional rows count as duplicates.
    """
    F = prog.F.tocsr()
    F.sum_duplicates()
    seen: dict = {}
    kept = []
    consistent = True
    message = ""
    for r in range(F.shape[0]):
        start, stop = F.indptr[r], F.indptr[r + 1]
        idx = F.indices[start:stop]
        val = F.data[start:stop]
        mask = np.abs(val) > 1e-15
        idx, val = idx[mask], val[mask]
        if len(idx) == 0:
            if abs(prog.g[r]) > 1e-12:
                consistent = False
                message = f"row {r} reads 0 == {prog.g[r]:g}"
            continue
        order = np.argsort(idx)
        idx, val = idx[order], val[order]
        scale = val[0]
        key = (tuple(idx.tolist()), tuple(np.round(val / scale, 12).tolist()))
        rhs = prog.g[r] / scale
        if key in seen:
            if abs(seen[key] - rhs) > 1e-10 * (1 + abs(rhs)):
                consistent = False
                message = f"row {r} contradicts an earlier copy"
            continue
        seen[key] = rhs
        kept.append(r)
    kept = np.asarray(kept, dtype=int)
    labels = None if prog.row_labels is None else [prog.row_labels[i] for i in kept]
    out = LmiProgram(prog.c, F[kept], prog.g[kept], prog.blocks, labels)
    return out, PresolveInfo(kept, F.shape[0], consistent, message)


# --------------------------------------------------------------------------
# dual-form core:  max b@z  s.t.  S_j = C_j - sum_i z_i A_j[i] >= 0


@dataclass
class _CoreResult:
    status: Status
    z: np.ndarray
    X: list
    S: list
    pobj: float
    dobj: float
    relgap: float
    pinf: float
    dinf: float
    iterations: int
    message: str = ""


def _max_step(X_chol: np.ndarray, dX: np.ndarray) -> float:
    """Largest ``a`` with ``X + a dX`` PSD, given ``X = L L^T``."""
    Li = sla.solve_triangular(X_chol, np.eye(len(X_chol)), lower=True)
    ev = np.linalg.eigvalsh(Li @ dX @ Li.T)
    lam = ev[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _chol(X: np.ndarray) -> Optional[np.ndarray]:
    try:
        return np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return None


def _solve_schur(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    d = np.diag(M).copy()
    scale = max(d.max(initial=0.0), 1e-300)
    reg = 0.0
    for _ in range(6):
        try:
            cf = sla.cho_factor(M + reg * np.eye(len(M)), lower=True, check_finite=False)
            return sla.cho_solve(cf, rhs, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            reg = scale * (1e-14 if reg == 0.0 else reg / scale * 100)
    return np.linalg.lstsq(M, rhs, rcond=None)[0]


def _dual_form_ipm(C, A, b, opts: SolverOptions) -> _CoreResult:
    p = len(b)
    nb = len(C)
    sizes = [len(Cj) for Cj in C]
    Af = [Aj.reshape(p, -1) for Aj in A]
    ntot = sum(sizes)

    def Aop(Y):
        out = np.zeros(p)
        for j in range(nb):
            out += Af[j] @ Y[j].ravel()
        return out

    def ATop(z):
        return [(z @ Af[j]).reshape(sizes[j], sizes[j]) for j in range(nb)]

    normb = np.linalg.norm(b)
    normC = np.sqrt(sum(np.sum(Cj * Cj) for Cj in C))
    X, S = [], []
    for j in range(nb):
        s = sizes[j]
        anorm = np.linalg.norm(Af[j], axis=1) if p else np.zeros(0)
        xi = max(10.0, np.sqrt(s), s * max(((1 + np.abs(b)) / (1 + anorm)).max(initial=0.0), 0.0))
        eta = max(10.0, np.sqrt(s), np.linalg.norm(C[j]), anorm.max(initial=0.0))
        X.append(xi * np.eye(s))
        S.append(eta * np.eye(s))
    z = np.zeros(p)

    best = None
    status = Status.MAX_ITER
    message = ""
    it = 0
    for it in range(1, opts.max_iter + 1):
        ATz = ATop(z)
        rp = b - Aop(X)
        Rd = [C[j] - ATz[j] - S[j] for j in range(nb)]
        pobj = sum(np.sum(C[j] * X[j]) for j in range(nb))
        dobj = float(b @ z)
        mu = sum(np.sum(X[j] * S[j]) for j in range(nb)) / ntot
        pinf = np.linalg.norm(rp) / (1 + normb)
        dinf = np.sqrt(sum(np.sum(R * R) for R in Rd)) / (1 + normC)
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        if opts.verbose:
            log.info("it %3d pobj %+.8e dobj %+.8e gap %.2e pinf %.2e dinf %.2e mu %.2e",
                     it, pobj, dobj, relgap, pinf, dinf, mu)
        score = max(relgap / opts.gap_tol, pinf / opts.feas_tol, dinf / opts.feas_tol)
        if best is None or score < best[0]:
            best = (score, z.copy(), [x.copy() for x in X], [s.copy() for s in S],
                    pobj, dobj, relgap, pinf, dinf)
        if relgap <= opts.gap_tol and pinf <= opts.feas_tol and dinf <= opts.feas_tol:
            status = Status.OPTIMAL
            break
        # Farkas-type certificates, checked on the current iterate
        trace_cx = pobj
        xnorm = np.sqrt(sum(np.sum(x * x) for x in X))
        if trace_cx < 0 and xnorm > 1e6 and np.linalg.norm(Aop(X)) <= opts.infeas_tol * (-trace_cx):
            status = Status.INFEASIBLE
            message = "primal-side ray: X >= 0, A(X) ~ 0, <C, X> < 0"
            break
        if dobj > 0 and np.linalg.norm(z) > 1e6:
            lam = min(np.linalg.eigvalsh(-ATz[j])[0] for j in range(nb)) if nb else 0.0
            if max(0.0, -lam) <= opts.infeas_tol * dobj:
                status = Status.UNBOUNDED
                message = "dual-side ray: -sum z A >= 0, b@z > 0"
                break

        Sinv = [np.linalg.inv(Sj) for Sj in S]
        for j in range(nb):
            Sinv[j] = 0.5 * (Sinv[j] + Sinv[j].T)
        M = np.zeros((p, p))
        for j in range(nb):
            G = np.matmul(np.matmul(X[j], A[j]), Sinv[j])
            M += Af[j] @ G.reshape(p, -1).T
        M = 0.5 * (M + M.T)

        def direction(Rc):
            rhs = rp - Aop([Rc[j] - X[j] @ Rd[j] @ Sinv[j] for j in range(nb)])
            dz = _solve_schur(M, rhs)
            ATdz = ATop(dz)
            dS = [Rd[j] - ATdz[j] for j in range(nb)]
            dX = [Rc[j] - X[j] @ dS[j] @ Sinv[j] for j in range(nb)]
            dX = [0.5 * (d + d.T) for d in dX]
            return dz, dX, dS

        LX = [_chol(x) for x in X]
        LS = [_chol(s) for s in S]
        if any(L is None for L in LX + LS):
            status = Status.NUMERICAL_TROUBLE
            message = "iterate lost definiteness"
            break

        def steps(dX, dS):
            ap = min([1.0] + [_max_step(LX[j], dX[j]) for j in range(nb)])
            ad = min([1.0] + [_max_step(LS[j], dS[j]) for j in range(nb)])
            return ap, ad

        # predictor
        Rc = [-X[j] for j in range(nb)]
        dz_a, dX_a, dS_a = direction(Rc)
        ap_a, ad_a = steps(dX_a, dS_a)
        mu_a = sum(np.sum((X[j] + ap_a * dX_a[j]) * (S[j] + ad_a * dS_a[j])) for j in range(nb)) / ntot
        expon = max(1.0, 3.0 * min(ap_a, ad_a) ** 2)
        sigma = min(1.0, (max(mu_a, 0.0) / mu) ** expon) if mu > 0 else 0.0
        # corrector
        Rc = [sigma * mu * Sinv[j] - X[j] - dX_a[j] @ dS_a[j] @ Sinv[j] for j in range(nb)]
        dz, dX, dS = direction(Rc)
        ap, ad = steps(dX, dS)
        gamma = 0.9 + 0.09 * min(ap, ad)
        ap = min(1.0, gamma * ap)
        ad = min(1.0, gamma * ad)
        if max(ap, ad) < opts.min_step:
            status = Status.NUMERICAL_TROUBLE
            message = "step sizes collapsed"
            break
        X = [X[j] + ap * dX[j] for j in range(nb)]
        z = z + ad * dz
        S = [S[j] + ad * dS[j] for j in range(nb)]
        X = [0.5 * (x + x.T) for x in X]
        S = [0.5 * (s + s.T) for s in S]

    if status in (Status.MAX_ITER, Status.NUMERICAL_TROUBLE) and best is not None:
        _, z, X, S, pobj, dobj, relgap, pinf, dinf = best
    return _CoreResult(status, z, X, S, pobj, dobj, relgap, pinf, dinf, it, message)


# --------------------------------------------------------------------------
# reduction of the user-facing program to the dual-form core


def _nullspace_parametrisation(F: np.ndarray, g: np.ndarray, rank_tol: float):
    """Return ``(y0, N, piv, rank, Q1, R11)`` with ``F (y0 + N z) = g``."""
    m_y = F.shape[1]
    if F.shape[0] == 0:
        return np.zeros(m_y), np.eye(m_y), np.zeros(0, dtype=int), 0, np.zeros((m_y, 0)), np.zeros((0, 0))
    Q, R, piv = sla.qr(F.T, pivoting=True, mode="full")
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > rank_tol * max(diag[0], 1.0))) if len(diag) else 0
    Q1, N = Q[:, :rank], Q[:, rank:]
    R11 = R[:rank, :rank]
    y0 = Q1 @ sla.solve_triangular(R11.T, g[piv[:rank]], lower=True)
    return y0, N, piv[:rank], rank, Q1, R11


def _common_range(C: np.ndarray, A: np.ndarray, tol: float = 1e-9) -> Optional[np.ndarray]:
    """Orthonormal basis of the span of the ranges of ``C`` and every ``A[i]``.

    Vectors outside it are annihilated by the block on the whole affine set,
    so the PSD constraint can be restricted to this subspace.  Returns None
    when nothing would be removed.
    """
    s = len(C)
    stack = np.concatenate([C[None], A], axis=0).reshape(-1, s)
    _, sv, Vt = np.linalg.svd(stack, full_matrices=False)
    rank = int(np.sum(sv > tol * max(sv[0] if len(sv) else 0.0, 1.0)))
    if rank == s:
        return None
    return Vt[:rank].T


def solve(prog: LmiProgram, opts: Optional[SolverOptions] = None) -> SdpSolution:
    """Solve ``prog``; deterministic for identical inputs and options."""
    opts = opts or SolverOptions()
    m_y = prog.m_y
    pre, info = presolve(prog)
    F = pre.F.toarray()
    g = pre.g
    nan_sol = lambda status, msg: SdpSolution(  # noqa: E731
        status, np.full(m_y, np.nan), np.inf if status is Status.INFEASIBLE else np.nan,
        np.nan, np.zeros(prog.n_rows), [np.zeros((b.size, b.size)) for b in prog.blocks],
        np.inf, np.inf, np.inf, -np.inf, 0, (info.raw_rows, len(info.kept_rows)), msg)
    if not info.consistent:
        return nan_sol(Status.INFEASIBLE, "inconsistent equalities: " + info.message)

    y0, N, piv, rank, Q1, R11 = _nullspace_parametrisation(F, g, opts.rank_tol)
    eq_res = np.abs(F @ y0 - g).max(initial=0.0)
    if eq_res > 1e3 * opts.feas_tol * (1 + np.abs(g).max(initial=0.0)):
        return nan_sol(Status.INFEASIBLE, f"equalities are inconsistent (residual {eq_res:.2e})")
    p = N.shape[1]

    # reduced block data
    Cred, Ared, faces = [], [], []
    for blk in prog.blocks:
        s = blk.size
        const = blk.constant if blk.constant is not None else np.zeros((s, s))
        Cj = const + (blk.operator @ y0).reshape(s, s)
        Aj = np.asarray(blk.operator @ N).T.reshape(p, s, s) if p else np.zeros((0, s, s))
        U = _common_range(Cj, Aj) if opts.use_faces else None
        if U is not None:
            Cj = U.T @ Cj @ U
            Aj = np.matmul(np.matmul(U.T[None], Aj), U[None]) if p else np.zeros((0, U.shape[1], U.shape[1]))
        Cred.append(0.5 * (Cj + Cj.T))
        Ared.append(0.5 * (Aj + np.transpose(Aj, (0, 2, 1))))
        faces.append(U)
    ctil = N.T @ prog.c
    c0 = float(prog.c @ y0)

    # free directions invisible to every block
    Z = None
    if p:
        gram = sum(Aj.reshape(p, -1) @ Aj.reshape(p, -1).T for Aj in Ared) if Ared else np.zeros((p, p))
        ev, V = np.linalg.eigh(gram)
        keep = ev > 1e-12 * max(ev.max(initial=0.0), 1.0)
        if not np.all(keep):
            Vfree = V[:, ~keep]
            if np.linalg.norm(Vfree.T @ ctil) > 1e-10 * (1 + np.linalg.norm(ctil)):
                sol = nan_sol(Status.UNBOUNDED, "objective decreases along a direction no block sees")
                sol.psi = -np.inf
                return sol
            Z = V[:, keep]
            Ared = [np.tensordot(Z.T, Aj, axes=(1, 0)) for Aj in Ared]
            ctil = Z.T @ ctil
    if Z is not None:
        p_eff = Z.shape[1]
    else:
        p_eff = p

    iterations = 0
    message = ""
    if not prog.blocks or p_eff == 0:
        zred = np.zeros(p_eff)
        Xs = [np.zeros_like(Cj) for Cj in Cred]
        if not prog.blocks and p_eff and np.linalg.norm(ctil) > 1e-12:
            sol = nan_sol(Status.UNBOUNDED, "no PSD blocks and a nonzero reduced objective")
            sol.psi = -np.inf
            return sol
        mins = [np.linalg.eigvalsh(Cj)[0] for Cj in Cred if len(Cj)]
        if mins and min(mins) < -opts.feas_tol:
            return nan_sol(Status.INFEASIBLE, "fixed block is not PSD")
        status = Status.OPTIMAL
        relgap = 0.0
    else:
        active = [j for j, Cj in enumerate(Cred) if len(Cj)]
        core = _dual_form_ipm([Cred[j] for j in active], [-Ared[j] for j in active], -ctil, opts)
        status, zred, iterations, message = core.status, core.z, core.iterations, core.message
        Xs = [np.zeros_like(Cj) for Cj in Cred]
        for j, Xj in zip(active, core.X):
            Xs[j] = Xj
        if status is Status.INFEASIBLE:
            return nan_sol(status, message)
        if status is Status.UNBOUNDED:
            sol = nan_sol(status, message)
            sol.psi = -np.inf
            return sol
        relgap = core.relgap

    zfull = Z @ zred if Z is not None else zred
    y = y0 + N @ zfull if p else y0.copy()
    phi = float(prog.c @ y)
    psi = c0 - sum(float(np.sum(Cred[j] * Xs[j])) for j in range(len(Cred)))
    block_duals = []
    for j, blk in enumerate(prog.blocks):
        U = faces[j]
        block_duals.append(U @ Xs[j] @ U.T if U is not None else Xs[j])
    # equality multipliers from  F^T lam = c - sum_j A_j^*(Z_j)
    resid_c = prog.c.copy()
    for j, blk in enumerate(prog.blocks):
        resid_c -= blk.operator.T @ block_duals[j].ravel()
    lam_kept = np.zeros(F.shape[0])
    if rank:
        lam_kept[piv] = sla.solve_triangular(R11, Q1.T @ resid_c)
    eq_duals = np.zeros(prog.n_rows)
    eq_duals[info.kept_rows] = lam_kept
    dual_res = float(np.abs(resid_c - pre.F.T @ lam_kept).max(initial=0.0))

    primal_res = float(np.abs(prog.F @ y - prog.g).max(initial=0.0))
    min_eig = min((np.linalg.eigvalsh(blk.value(y))[0] for blk in prog.blocks), default=np.inf)
    gap = abs(phi - psi)
    if status is Status.OPTIMAL and gap > opts.gap_tol * (1 + abs(phi)) * 10:
        message = (message + "; " if message else "") + f"original-scale gap {gap:.2e}"
    return SdpSolution(
        status, y, phi, psi, eq_duals, block_duals, gap, primal_res, dual_res,
        float(min_eig), iterations, (info.raw_rows, len(info.kept_rows)), message,
    )


# --------------------------------------------------------------------------
# debug dump

DUMP_HEADER = "# momrec-sdp-dump v1"


def dump_program(prog: LmiProgram, out: TextIO | None = None) -> str:
    """Write ``prog`` in the line-oriented sparse text format.

    Lines (whitespace separated, indices zero based)::

        dims <m_y> <rows> <blocks>
        size <block> <size>
        c <alpha> <value>
        g <row> <value>
        F <row> <alpha> <value>
        A <block> <alpha> <row> <col> <value>     (lower triangle, alpha = -1 is the constant)
    """
    buf = out if out is not None else io.StringIO()
    w = buf.write
    w(DUMP_HEADER + "\n")
    w(f"dims {prog.m_y} {prog.n_rows} {len(prog.blocks)}\n")
    for j, blk in enumerate(prog.blocks):
        w(f"size {j} {blk.size}\n")
    for a in np.flatnonzero(prog.c):
        w(f"c {a} {prog.c[a]:.17g}\n")
    for r in np.flatnonzero(prog.g):
        w(f"g {r} {prog.g[r]:.17g}\n")
    Fc = prog.F.tocoo()
    for r, a, v in sorted(zip(Fc.row.tolist(), Fc.col.tolist(), Fc.data.tolist())):
        w(f"F {r} {a} {v:.17g}\n")
    for j, blk in enumerate(prog.blocks):
        s = blk.size
        if blk.constant is not None:
            for r in range(s):
                for c in range(r + 1):
                    if blk.constant[r, c] != 0:
                        w(f"A {j} -1 {r} {c} {blk.constant[r, c]:.17g}\n")
        op = blk.operator.tocoo()
        entries = []
        for flat, a, v in zip(op.row.tolist(), op.col.tolist(), op.data.tolist()):
            r, c = divmod(flat, s)
            if r >= c and v != 0:
                entries.append((a, r, c, v))
        for a, r, c, v in sorted(entries):
            w(f"A {j} {a} {r} {c} {v:.17g}\n")
    return buf.getvalue() if out is None else ""


def load_program(text: str) -> LmiProgram:
    """Inverse of :func:`dump_program` (used to cross-check dumps)."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    m_y = rows = nblocks = 0
    sizes: dict = {}
    c = g = None
    Fr, Fa, Fv = [], [], []
    bent: dict = {}
    for parts in lines:
        tag = parts[0]
        if tag == "dims":
            m_y, rows, nblocks = map(int, parts[1:4])
            c, g = np.zeros(m_y), np.zeros(rows)
        elif tag == "size":
            sizes[int(parts[1])] = int(parts[2])
        elif tag == "c":
            c[int(parts[1])] = float(parts[2])
        elif tag == "g":
            g[int(parts[1])] = float(parts[2])
        elif tag == "F":
            Fr.append(int(parts[1])); Fa.append(int(parts[2])); Fv.append(float(parts[3]))
        elif tag == "A":
            bent.setdefault(int(parts[1]), []).append(
                (int(parts[2]), int(parts[3]), int(parts[4]), float(parts[5])))
        else:
            raise ValueError(f"unknown dump line tag {tag!r}")
    F = sp.csr_matrix((Fv, (Fr, Fa)), shape=(rows, m_y))
    blocks = []
    for j in range(nblocks):
        s = sizes[j]
        const = np.zeros((s, s))
        r_, c_, v_ = [], [], []
        has_const = False
        for a, r, cc, v in bent.get(j, []):
            if a < 0:
                const[r, cc] = const[cc, r] = v
                has_const = True
                continue
            r_.append(r * s + cc); c_.append(a); v_.append(v)
            if r != cc:
                r_.append(cc * s + r); c_.append(a); v_.append(v)
        op = sp.csr_matrix((v_, (r_, c_)), shape=(s * s, m_y))
        blocks.append(LmiBlock(op, s, const if has_const else None))
    return LmiProgram(c, F, g, blocks)
