"""Symmetric tensors, their homogeneous moment vectors and recovery front-ends.

A symmetric tensor ``A`` in ``S^d(R^n)`` is stored by one value per exponent
``alpha`` with ``|alpha| = d``, in the same graded-lex order used for moment
vectors.  The entry ``A[i_1, ..., i_d]`` lives at the exponent counting how
often each index occurs, so ``A`` is identified with the homogeneous
truncated multi-sequence ``h_alpha = A[i_1, ..., i_d]``.

For measurement tensors ``F`` the Hilbert-Schmidt product is

    <F, A> = sum_alpha mult(alpha) F_alpha A_alpha,
    mult(alpha) = d! / (alpha_1! ... alpha_n!),

which equals ``<f, h>`` for ``f(x) = <F, x^{(d)}>``.  Equations stated on
entries, such as ``A_111 - 2 A_222 = 1``, compile to the functional
``x1^3 - 2 x2^3`` directly.

Multi-indices in the public helpers are 1-based, matching how entries are
usually written.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, prod
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from . import extract as ex
from .polycore import Exponent, Poly, exponents_of_degree, moment_vectors
from .relax import HierarchyOptions, HierarchyReport, MrpProblem, Outcome, run_hierarchy
from .semialg import SemialgebraicSet, homogeneity_check, membership_residual


def multiplicity(alpha: Sequence[int]) -> int:
    """Number of index tuples that sort to ``alpha``."""
    return factorial(sum(alpha)) // prod(factorial(a) for a in alpha)


def index_to_exponent(index: Sequence[int], n: int, one_based: bool = True) -> Exponent:
    """Multi-index ``(i_1, ..., i_d)`` to its exponent vector."""
    alpha = [0] * n
    shift = 1 if one_based else 0
    for i in index:
        j = int(i) - shift
        if not 0 <= j < n:
            raise ValueError(f"index {i} out of range for n = {n}")
        alpha[j] += 1
    return tuple(alpha)


def exponent_to_index(alpha: Sequence[int], one_based: bool = True) -> tuple[int, ...]:
    """Sorted multi-index of an exponent vector."""
    shift = 1 if one_based else 0
    return tuple(i + shift for i, a in enumerate(alpha) for _ in range(a))


class _Slice:
    """Degree-``d`` exponents in basis order with a lookup table."""

    _cache: dict = {}

    def __new__(cls, n: int, d: int):
        key = (n, d)
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj.exponents = exponents_of_degree(n, d)
            obj.index = {a: i for i, a in enumerate(obj.exponents)}
            obj.mult = np.array([multiplicity(a) for a in obj.exponents], dtype=float)
            cls._cache[key] = obj
        return cls._cache[key]


def sym_size(n: int, d: int) -> int:
    return len(_Slice(n, d).exponents)


@dataclass(frozen=True, eq=False)
class SymTensor:
    n: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if len(vals) != sym_size(self.n, self.d):
            raise ValueError(f"expected {sym_size(self.n, self.d)} canonical values, got {len(vals)}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, n: int, d: int) -> "SymTensor":
        return cls(n, d, np.zeros(sym_size(n, d)))

    @classmethod
    def from_entries(cls, n: int, d: int, entries: Mapping[Sequence[int], float]) -> "SymTensor":
        """Canonical entries keyed by 1-based multi-indices (any order within a key)."""
        sl = _Slice(n, d)
        vals = np.zeros(len(sl.exponents))
        for idx, v in entries.items():
            if len(idx) != d:
                raise ValueError(f"multi-index {idx} does not have {d} entries")
            vals[sl.index[index_to_exponent(idx, n)]] = float(v)
        return cls(n, d, vals)

    @classmethod
    def from_full(cls, A: np.ndarray, tol: float = 1e-12) -> "SymTensor":
        A = np.asarray(A, dtype=float)
        n, d = A.shape[0], A.ndim
        if any(s != n for s in A.shape):
            raise ValueError("tensor is not cubical")
        sl = _Slice(n, d)
        vals = np.array([A[exponent_to_index(a, one_based=False)] for a in sl.exponents])
        out = cls(n, d, vals)
        if np.abs(out.full() - A).max(initial=0.0) > tol * max(1.0, np.abs(A).max(initial=0.0)):
            raise ValueError("tensor is not symmetric")
        return out

    @classmethod
    def rank_one(cls, u: Sequence[float], d: int, weight: float = 1.0) -> "SymTensor":
        u = np.asarray(u, dtype=float)
        return cls(len(u), d, weight * moment_vectors(u[None], d)[-sym_size(len(u), d):, 0])

    @property
    def exponents(self) -> list[Exponent]:
        return _Slice(self.n, self.d).exponents

    @property
    def multiplicities(self) -> np.ndarray:
        return _Slice(self.n, self.d).mult

    def __getitem__(self, index: Sequence[int]) -> float:
        """Entry at a 0-based multi-index, in any order."""
        return float(self.values[_Slice(self.n, self.d).index[index_to_exponent(index, self.n, False)]])

    def full(self) -> np.ndarray:
        out = np.empty((self.n,) * self.d)
        for idx in np.ndindex(*out.shape):
            out[idx] = self[idx]
        return out

    def _check(self, other: "SymTensor") -> None:
        if (self.n, self.d) != (other.n, other.d):
            raise ValueError("tensor shapes differ")

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._check(other)
        return SymTensor(self.n, self.d, self.values + other.values)

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        self._check(other)
        return SymTensor(self.n, self.d, self.values - other.values)

    def __mul__(self, c: float) -> "SymTensor":
        return SymTensor(self.n, self.d, float(c) * self.values)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymTensor):
            return NotImplemented
        return (self.n, self.d) == (other.n, other.d) and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self) -> str:
        return f"SymTensor(n={self.n}, d={self.d})"


@dataclass(frozen=True, eq=False)
class Htms:
    n: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if len(vals) != sym_size(self.n, self.d):
            raise ValueError("wrong htms length")
        object.__setattr__(self, "values", vals)


def tensor_to_htms(A: SymTensor) -> Htms:
    return Htms(A.n, A.d, A.values.copy())


def htms_to_tensor(h: Htms) -> SymTensor:
    return SymTensor(h.n, h.d, h.values.copy())


def hs_inner(F: SymTensor, A: SymTensor) -> float:
    """Hilbert-Schmidt product summed over all ``n^d`` entries."""
    F._check(A)
    return float(np.sum(F.multiplicities * F.values * A.values))


def measurement_poly(F: SymTensor) -> Poly:
    """``f(x) = <F, x^{(d)}>``: coefficient ``mult(alpha) F_alpha`` at ``x^alpha``."""
    terms = {a: m * v for a, m, v in zip(F.exponents, F.multiplicities, F.values) if v != 0.0}
    return Poly(F.n, terms)


EntrySpec = Sequence[tuple[Sequence[int], float]]


def entry_equation(terms: EntrySpec, n: int, d: int) -> SymTensor:
    """``F`` with ``<F, A> = sum coef * A[index]`` for 1-based entry terms.

    Terms hitting the same symmetric slot accumulate.
    """
    sl = _Slice(n, d)
    vals = np.zeros(len(sl.exponents))
    for idx, coef in terms:
        if len(idx) != d:
            raise ValueError(f"multi-index {tuple(idx)} does not have {d} entries")
        pos = sl.index[index_to_exponent(idx, n)]
        vals[pos] += float(coef) / sl.mult[pos]
    return SymTensor(n, d, vals)


def equations_to_functionals(
    F_list: Sequence[Union[SymTensor, EntrySpec]], b: Sequence[float], n: Optional[int] = None,
    d: Optional[int] = None,
) -> list[tuple[Poly, float]]:
    """Pair each measurement tensor (or entry spec) with its right-hand side."""
    if len(F_list) != len(b):
        raise ValueError("one right-hand side per equation is required")
    out = []
    for F, bi in zip(F_list, b):
        if not isinstance(F, SymTensor):
            if n is None or d is None:
                raise ValueError("entry specs need n and d")
            F = entry_equation(F, n, d)
        if (n is not None and F.n != n) or (d is not None and F.d != d):
            raise ValueError("measurement tensors have mixed shapes")
        n, d = F.n, F.d
        out.append((measurement_poly(F), float(bi)))
    return out


# --------------------------------------------------------------------------
# decompositions


@dataclass
class Decomposition:
    """``A = sum_i signs[i] * weights[i] * atoms[i]^{(d)}`` with positive weights."""

    signs: np.ndarray
    weights: np.ndarray
    atoms: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        self.signs = np.asarray(self.signs, dtype=float).ravel()
        atoms = np.asarray(self.atoms, dtype=float)
        width = atoms.shape[-1] if atoms.ndim == 2 else (atoms.size // max(len(self.weights), 1))
        self.atoms = atoms.reshape(len(self.weights), width)
        if len(self.signs) != len(self.weights):
            raise ValueError("one sign per term is required")

    @classmethod
    def from_measures(cls, positive: ex.AtomicMeasure, negative: Optional[ex.AtomicMeasure] = None):
        parts = [positive] + ([negative] if negative is not None else [])
        n = positive.atoms.shape[1]
        return cls(np.concatenate([np.full(p.r, s) for p, s in zip(parts, [1.0, -1.0])]),
                   np.concatenate([p.weights for p in parts]),
                   np.concatenate([p.atoms for p in parts]).reshape(-1, n))

    @property
    def r(self) -> int:
        return len(self.weights)

    @property
    def r1(self) -> int:
        return int(np.sum(self.signs > 0))

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    def terms(self):
        return list(zip(self.signs.tolist(), self.weights.tolist(), self.atoms))


def reconstruct(dec: Decomposition, d: int) -> SymTensor:
    n = dec.n
    if dec.r == 0:
        return SymTensor.zeros(n, d)
    size = sym_size(n, d)
    V = moment_vectors(dec.atoms, d)[-size:]
    return SymTensor(n, d, V @ (dec.signs * dec.weights))


def residual(dec: Decomposition, F_list: Sequence[SymTensor], b: Sequence[float]) -> float:
    """``max_i |<F_i, A> - b_i|`` for the reconstructed ``A``."""
    if not F_list:
        return 0.0
    A = reconstruct(dec, F_list[0].d) if dec.r else SymTensor.zeros(F_list[0].n, F_list[0].d)
    return float(max(abs(hs_inner(F, A) - bi) for F, bi in zip(F_list, b)))


# --------------------------------------------------------------------------
# recovery


@dataclass
class TensorRecovery:
    outcome: Outcome
    decomposition: Optional[Decomposition]
    tensor: Optional[SymTensor]
    residual: float
    membership: np.ndarray = field(default_factory=lambda: np.zeros(0))
    report: Optional[HierarchyReport] = None

    @property
    def recovered(self) -> bool:
        return self.outcome is Outcome.RECOVERED


def _to_tensors(F_list, n: int, d: int) -> list[SymTensor]:
    return [F if isinstance(F, SymTensor) else entry_equation(F, n, d) for F in F_list]


def _check_set(K: SemialgebraicSet) -> None:
    if not K.sphere:
        raise ValueError("tensor recovery needs the sphere flag on K")
    if not homogeneity_check(K):
        raise ValueError("tensor recovery needs homogeneous constraints")


def _recover(K, F_list, b, d, signed, seed, k_min, k_max, options, objective) -> TensorRecovery:
    _check_set(K)
    Fs = _to_tensors(F_list, K.n, d)
    for F in Fs:
        if (F.n, F.d) != (K.n, d):
            raise ValueError(f"measurement tensor of shape ({F.n}, {F.d}) in a ({K.n}, {d}) problem")
    functionals = [(measurement_poly(F), float(bi)) for F, bi in zip(Fs, b)]
    prob = MrpProblem(K, functionals, signed=signed)
    # empty or low-degree functionals still relax at the tensor degree
    if prob.d1 < 2 * -(-d // 2):
        kmin_tensor = max(-(-d // 2), K.degree)
        k_min = kmin_tensor if k_min is None else k_min
    rep = run_hierarchy(prob, seed=seed, k_min=k_min, k_max=k_max, options=options, objective=objective)
    if not rep.recovered:
        return TensorRecovery(rep.outcome, None, None, np.inf, report=rep)
    dec = Decomposition.from_measures(*rep.measures)
    A = reconstruct(dec, d)
    res = residual(dec, Fs, b)
    mem = np.array([membership_residual(K, u) for u in dec.atoms])
    return TensorRecovery(rep.outcome, dec, A, res, mem, rep)


def recover_positive(K: SemialgebraicSet, F_list, b: Sequence[float], d: int, seed: Optional[int] = 0,
                     k_min: Optional[int] = None, k_max: Optional[int] = None,
                     options: Optional[HierarchyOptions] = None, objective=None) -> TensorRecovery:
    """Find ``A = sum lambda_i u_i^{(d)}``, ``u_i in K``, ``lambda_i > 0``, with ``<F_i, A> = b_i``.

    ``F_list`` holds :class:`SymTensor` measurements or 1-based entry specs
    ``[(index, coef), ...]``.
    """
    return _recover(K, F_list, b, d, False, seed, k_min, k_max, options, objective)


def recover_general(K: SemialgebraicSet, F_list, b: Sequence[float], d: int, seed: Optional[int] = 0,
                    k_min: Optional[int] = None, k_max: Optional[int] = None,
                    options: Optional[HierarchyOptions] = None, objective=None) -> TensorRecovery:
    """Signed recovery through a pair of measures; ``w`` atoms are positive, ``v`` atoms negative."""
    return _recover(K, F_list, b, d, True, seed, k_min, k_max, options, objective)


def cp_set(n: int) -> SemialgebraicSet:
    """Nonnegative part of the unit sphere, for completely positive tensors."""
    return SemialgebraicSet.nonnegative_sphere(n)
