"""Moment and localizing matrices, and their stencils as linear maps of ``y``.

For a polynomial ``q`` and order ``k`` the localizing matrix has rows and
columns indexed by ``monomial_basis(n, k - ceil(deg q / 2))`` and entries

    L[beta, gamma] = sum_alpha q_alpha * y[alpha + beta + gamma].

``q = 1`` gives the moment matrix ``M_k[y]``.  A :class:`LocalizingStencil`
stores that map as a sparse ``(s*s, len(y))`` matrix so the relaxation
assembler can reuse it for every block coefficient at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil

import numpy as np
import scipy.sparse as sp

from .polycore import Poly, Tms, basis_size, monomial_basis


def localizing_size(n: int, q: Poly, k: int) -> int:
    return basis_size(n, k - ceil(q.deg / 2))


class _Encoder:
    """Integer codes for exponents of degree <= D, mapped to basis positions."""

    def __init__(self, n: int, D: int):
        self.radix = (D + 1) ** np.arange(n, dtype=np.int64)
        basis = monomial_basis(n, D)
        codes = basis.array @ self.radix
        self.order = np.argsort(codes)
        self.sorted_codes = codes[self.order]

    def positions(self, exps: np.ndarray) -> np.ndarray:
        codes = exps @ self.radix
        loc = np.searchsorted(self.sorted_codes, codes)
        return self.order[loc]


@lru_cache(maxsize=None)
def _encoder(n: int, D: int) -> _Encoder:
    return _Encoder(n, D)


@dataclass(frozen=True, eq=False)
class LocalizingStencil:
    """Sparse linear map ``y -> vec(L_q^(k)[y])`` (row-major vectorisation)."""

    q: Poly
    k: int
    size: int
    operator: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.q.n

    @property
    def moment_length(self) -> int:
        return self.operator.shape[1]

    def apply(self, y) -> np.ndarray:
        vals = y.values if isinstance(y, Tms) else np.asarray(y, dtype=float)
        vals = vals[: self.moment_length]
        return (self.operator @ vals).reshape(self.size, self.size)

    def entry_map(self) -> dict:
        """``{(row, col): {moment index: coefficient}}`` for the lower triangle."""
        out = {}
        op = self.operator.tocsr()
        for r in range(self.size):
            for c in range(r + 1):
                row = op.getrow(r * self.size + c)
                out[(r, c)] = dict(zip(row.indices.tolist(), row.data.tolist()))
        return out

    def lower_rows(self) -> sp.csr_matrix:
        """Operator rows for entries with ``row >= col`` (one per distinct entry)."""
        r, c = np.tril_indices(self.size)
        return self.operator[r * self.size + c]


def _build_stencil(q: Poly, k: int) -> LocalizingStencil:
    n = q.n
    if q.deg > 2 * k:
        raise ValueError(f"deg q = {q.deg} exceeds 2k = {2 * k}")
    s_deg = k - ceil(q.deg / 2)
    basis = monomial_basis(n, s_deg)
    s = len(basis)
    enc = _encoder(n, 2 * k)
    pair_exps = basis.array[:, None, :] + basis.array[None, :, :]  # (s, s, n)
    pair_exps = pair_exps.reshape(s * s, n)
    rows, cols, data = [], [], []
    for alpha, c in q.terms.items():
        exps = pair_exps + np.asarray(alpha, dtype=np.int64)[None, :]
        rows.append(np.arange(s * s))
        cols.append(enc.positions(exps))
        data.append(np.full(s * s, c))
    if rows:
        rows, cols, data = map(np.concatenate, (rows, cols, data))
    op = sp.csr_matrix(
        (data, (rows, cols)), shape=(s * s, basis_size(n, 2 * k))
    )
    op.sum_duplicates()
    op.eliminate_zeros()
    return LocalizingStencil(q, k, s, op)


@lru_cache(maxsize=4096)
def _cached_stencil(q: Poly, k: int) -> LocalizingStencil:
    return _build_stencil(q, k)


def stencil(q: Poly, k: int) -> LocalizingStencil:
    """Cached stencil of ``L_q^(k)``; ``Poly`` hashes by content."""
    return _cached_stencil(q, k)


def _check_degree(y: Tms, k: int) -> None:
    if y.d < 2 * k:
        raise ValueError(f"tms of degree {y.d} is too short for order {k}")


def moment_matrix(y: Tms, k: int) -> np.ndarray:
    """``M_k[y]`` with entries ``y[beta + gamma]``."""
    _check_degree(y, k)
    basis = monomial_basis(y.n, k)
    enc = _encoder(y.n, 2 * k)
    idx = enc.positions(
        (basis.array[:, None, :] + basis.array[None, :, :]).reshape(-1, y.n)
    )
    return y.values[idx].reshape(len(basis), len(basis))


def localizing_matrix(q: Poly, y: Tms, k: int) -> np.ndarray:
    """``L_q^(k)[y]``: ``vec(p)^T L vec(p) = <q p^2, y>`` for deg p <= k - ceil(deg q/2)."""
    _check_degree(y, k)
    if q.n != y.n:
        raise ValueError("variable counts differ")
    return stencil(q, k).apply(y)
