"""Flat truncation tests and atom extraction from flat moment vectors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .momentlin import _encoder, moment_matrix
from .polycore import Tms, basis_size, monomial_basis, moment_vectors
from .semialg import SemialgebraicSet, membership_residual

RANK_TOL = 1e-6
ATOM_TOL = 1e-5
MERGE_TOL = 1e-6
COMMUTE_TOL = 1e-6
MAX_RESAMPLES = 5


class ExtractionError(RuntimeError):
    """Raised when a moment vector cannot be turned into atoms."""


@dataclass
class AtomicMeasure:
    atoms: np.ndarray
    weights: np.ndarray
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    reconstruction_error: float = 0.0
    degraded: bool = False

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        atoms = np.asarray(self.atoms, dtype=float)
        width = atoms.shape[-1] if atoms.ndim == 2 else (atoms.size // max(len(self.weights), 1))
        self.atoms = atoms.reshape(len(self.weights), width)

    @classmethod
    def zero(cls, n: int) -> "AtomicMeasure":
        return cls(np.zeros((0, n)), np.zeros(0))

    @property
    def r(self) -> int:
        return len(self.weights)

    def moments(self, d: int) -> Tms:
        n = self.atoms.shape[1]
        if self.r == 0:
            return Tms(n, d, np.zeros(basis_size(n, d)))
        return Tms(n, d, moment_vectors(self.atoms, d) @ self.weights)

    def integrate(self, p) -> float:
        """``sum_i weights[i] * p(atoms[i])``."""
        return float(sum(w * p(u) for w, u in zip(self.weights, self.atoms)))


def numeric_rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    """Singular values above ``tol * max(sigma_1, 1)``."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], 1.0)))


@dataclass
class FlatInfo:
    t: int
    rank: int
    rank_low: int


def flat_ranks(w: Tms, t: int, d_K: int, tol: float = RANK_TOL) -> tuple[int, int]:
    """``(rank M_{t-d_K}[w], rank M_t[w])``."""
    return (numeric_rank(moment_matrix(w, t - d_K), tol), numeric_rank(moment_matrix(w, t), tol))


def flat_degrees(w: Tms, k: int, d_K: int, tol: float = RANK_TOL, t_min: Optional[int] = None) -> Optional[FlatInfo]:
    """Smallest ``t`` in ``[t_min, k]`` with ``rank M_{t-d_K} = rank M_t``."""
    t_min = d_K if t_min is None else max(t_min, d_K)
    if w.d < 2 * k:
        raise ValueError(f"tms of degree {w.d} cannot be tested at order {k}")
    for t in range(t_min, k + 1):
        low, high = flat_ranks(w, t, d_K, tol)
        if low == high:
            return FlatInfo(t, high, low)
    return None


def _shift_table(n: int, t: int) -> np.ndarray:
    """``table[i, j]`` = position of ``e_i + b_j`` in the degree-``t`` basis, for deg b_j <= t-1."""
    low = monomial_basis(n, t - 1)
    enc = _encoder(n, t)
    eye = np.eye(n, dtype=np.int64)
    return np.stack([enc.positions(low.array + eye[i]) for i in range(n)])


def _atoms_from_factor(V: np.ndarray, n: int, t: int, rng: np.random.Generator):
    r = V.shape[1]
    n_low = basis_size(n, t - 1)
    Vlow = V[:n_low]
    _, R, piv = sla.qr(Vlow.T, pivoting=True, mode="economic")
    diag = np.abs(np.diag(R))
    if len(diag) < r or diag[r - 1] <= 1e-10 * max(diag[0], 1e-300):
        raise ExtractionError("no well-conditioned monomial basis of the required size")
    B = np.sort(piv[:r])
    W = sla.solve(V[B].T, V.T).T  # V = W @ V[B]
    shifts = _shift_table(n, t)
    Ns = [W[shifts[i][B]] for i in range(n)]
    best = None
    for _ in range(MAX_RESAMPLES + 1):
        xi = rng.standard_normal(n)
        xi /= np.linalg.norm(xi)
        Nmix = sum(x * Ni for x, Ni in zip(xi, Ns))
        T, Q = sla.schur(Nmix, output="real")
        leak = np.abs(np.diag(T, -1)).max(initial=0.0) / max(1.0, np.abs(T).max())
        coords = np.empty((r, n))
        for i, Ni in enumerate(Ns):
            Ti = Q.T @ Ni @ Q
            coords[:, i] = np.diag(Ti)
            leak = max(leak, np.abs(np.tril(Ti, -1)).max(initial=0.0) / max(1.0, np.abs(Ti).max()))
        if best is None or leak < best[0]:
            best = (leak, coords)
        if leak <= COMMUTE_TOL:
            break
    return best[1], best[0]


def _merge(atoms: np.ndarray, weights: np.ndarray, tol: float):
    out_a, out_w = [], []
    for u, lam in zip(atoms, weights):
        for j, v in enumerate(out_a):
            if np.linalg.norm(u - v) <= tol:
                out_w[j] += lam
                break
        else:
            out_a.append(u.copy())
            out_w.append(lam)
    return np.array(out_a).reshape(len(out_a), atoms.shape[1]), np.array(out_w)


def _fit_weights(atoms: np.ndarray, target: np.ndarray, d: int) -> np.ndarray:
    V = moment_vectors(atoms, d)
    return np.linalg.lstsq(V, target, rcond=None)[0]


def extract_atoms(
    w: Tms,
    t: int,
    K: Optional[SemialgebraicSet] = None,
    rank: Optional[int] = None,
    rank_tol: float = RANK_TOL,
    atom_tol: float = ATOM_TOL,
    merge_tol: float = MERGE_TOL,
    seed: int = 0,
) -> AtomicMeasure:
    """Atoms and weights of a flat ``w|_{2t}`` by the multiplication-matrix method.

    ``M_t = V V^T`` is factored, a monomial basis ``B`` of degree <= t-1 is
    chosen by pivoted QR on the rows of ``V``, and the multiplication matrices
    by each coordinate on ``B`` are simultaneously triangularised through the
    real Schur form of a random combination.  Weights are then fitted by least
    squares against every moment up to degree ``2t``.
    """
    if t < 1:
        raise ValueError("extraction needs t >= 1")
    n = w.n
    wt = w.truncate(2 * t)
    M = moment_matrix(wt, t)
    ev, U = np.linalg.eigh(0.5 * (M + M.T))
    ev, U = ev[::-1], U[:, ::-1]
    r = numeric_rank(M, rank_tol) if rank is None else rank
    if r == 0:
        return AtomicMeasure.zero(n)
    if ev[r - 1] <= 0:
        raise ExtractionError("moment matrix is not PSD on its numerical range")
    V = U[:, :r] * np.sqrt(ev[:r])
    rng = np.random.default_rng(seed)
    atoms, leak = _atoms_from_factor(V, n, t, rng)
    if K is not None and K.sphere:
        norms = np.linalg.norm(atoms, axis=1)
        if np.any(norms <= 1e-12):
            raise ExtractionError("atom at the origin cannot lie on the sphere")
        atoms = atoms / norms[:, None]
    atoms, _ = _merge(atoms, np.ones(len(atoms)), merge_tol)
    weights = _fit_weights(atoms, wt.values, 2 * t)
    scale = max(np.abs(weights).max(initial=0.0), 1.0)
    if np.any(weights < -1e-6 * scale):
        raise ExtractionError(f"negative weight {weights.min():.3e} in the fitted measure")
    keep = weights > 1e-10 * scale
    atoms = atoms[keep]
    weights = _fit_weights(atoms, wt.values, 2 * t) if keep.sum() else np.zeros(0)
    recon = moment_vectors(atoms, 2 * t) @ weights if len(weights) else np.zeros(len(wt))
    err = float(np.abs(recon - wt.values).max())
    res = np.array([membership_residual(K, u) for u in atoms]) if K is not None else np.zeros(len(atoms))
    degraded = bool(np.any(res > atom_tol)) or leak > COMMUTE_TOL
    return AtomicMeasure(atoms, weights, res, err, degraded)
