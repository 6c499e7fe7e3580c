"""Monomials, graded-lex bases, sparse polynomials and truncated moment vectors.

Exponents are plain tuples of nonnegative ints.  Every moment vector and
matrix index in the package goes through :func:`monomial_basis`, whose
ordering is graded first and lexicographic (``x1`` heaviest) within a degree::

    1, x1, ..., xn, x1^2, x1 x2, ..., xn^d

Because the ordering is graded, the basis of degree ``d`` is a prefix of the
basis of any higher degree, so truncating a moment vector is a slice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from numbers import Real
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

Exponent = Tuple[int, ...]

#: coefficients below this magnitude are dropped after arithmetic
ZERO_COEF = 1e-14


def _check_exponent(alpha: Sequence[int], n: int) -> Exponent:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise ValueError(f"exponent {alpha} has {len(alpha)} entries, expected {n}")
    if any(a < 0 for a in alpha):
        raise ValueError(f"exponent {alpha} has a negative entry")
    return alpha


def exponents_of_degree(n: int, d: int) -> list[Exponent]:
    """All exponents with ``|alpha| == d``, in lexicographic descending order."""
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for first in range(d, -1, -1):
        for rest in exponents_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


class MonomialBasis:
    """The ordered list of exponents in ``N^n_d`` plus the reverse index."""

    def __init__(self, n: int, d: int):
        if n < 1 or d < 0:
            raise ValueError("need n >= 1 and d >= 0")
        self.n = n
        self.d = d
        exps: list[Exponent] = []
        for deg in range(d + 1):
            exps.extend(exponents_of_degree(n, deg))
        self.exponents = exps
        self.index = {a: i for i, a in enumerate(exps)}
        self.array = np.array(exps, dtype=np.int64).reshape(len(exps), n)
        self.degrees = self.array.sum(axis=1)

    def __len__(self) -> int:
        return len(self.exponents)

    def __repr__(self) -> str:
        return f"MonomialBasis(n={self.n}, d={self.d}, size={len(self)})"

    def size_of_degree(self, d: int) -> int:
        """Number of exponents of degree at most ``d`` (a prefix length)."""
        return comb(self.n + d, d)


@lru_cache(maxsize=None)
def monomial_basis(n: int, d: int) -> MonomialBasis:
    return MonomialBasis(n, d)


def basis_size(n: int, d: int) -> int:
    return comb(n + d, d)


def basis_index(basis: MonomialBasis, alpha: Sequence[int]) -> int:
    """Position of ``x^alpha`` in ``basis``."""
    alpha = _check_exponent(alpha, basis.n)
    if sum(alpha) > basis.d:
        raise ValueError(f"degree of {alpha} exceeds basis degree {basis.d}")
    return basis.index[alpha]


def basis_monomial(basis: MonomialBasis, position: int) -> Exponent:
    return basis.exponents[position]


def add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True, eq=False)
class Poly:
    """Sparse real polynomial in ``n`` variables.

    ``terms`` maps exponent tuples to nonzero coefficients.  Instances are
    immutable; arithmetic returns new polynomials.
    """

    n: int
    terms: Mapping[Exponent, float] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Exponent, float] = {}
        for alpha, c in self.terms.items():
            alpha = _check_exponent(alpha, self.n)
            c = float(c)
            if abs(c) >= ZERO_COEF:
                clean[alpha] = c
        object.__setattr__(self, "terms", clean)

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: float, n: int) -> "Poly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, i: int, n: int) -> "Poly":
        """The coordinate ``x_{i+1}`` (``i`` is zero based)."""
        alpha = [0] * n
        alpha[i] = 1
        return cls(n, {tuple(alpha): 1.0})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: float = 1.0) -> "Poly":
        return cls(len(alpha), {tuple(alpha): c})

    @classmethod
    def from_coefficients(cls, coefs: Sequence[float], n: int, d: int) -> "Poly":
        """Polynomial whose coefficient vector in ``monomial_basis(n, d)`` is ``coefs``."""
        basis = monomial_basis(n, d)
        if len(coefs) != len(basis):
            raise ValueError("coefficient vector does not match basis size")
        return cls(n, dict(zip(basis.exponents, coefs)))

    @classmethod
    def sphere(cls, n: int) -> "Poly":
        """``||x||^2 - 1``."""
        terms = {(0,) * n: -1.0}
        for i in range(n):
            alpha = [0] * n
            alpha[i] = 2
            terms[tuple(alpha)] = 1.0
        return cls(n, terms)

    # properties -------------------------------------------------------
    @property
    def deg(self) -> int:
        """Total degree; the zero polynomial has degree 0 by convention."""
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(a) for a in self.terms}) <= 1

    def coefficients(self, d: int | None = None) -> np.ndarray:
        """Dense coefficient vector in ``monomial_basis(n, d)``."""
        d = self.deg if d is None else d
        if self.deg > d:
            raise ValueError(f"degree {self.deg} exceeds {d}")
        basis = monomial_basis(self.n, d)
        out = np.zeros(len(basis))
        for alpha, c in self.terms.items():
            out[basis.index[alpha]] = c
        return out

    def key(self) -> tuple:
        return (self.n, tuple(sorted(self.terms.items())))

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other) -> bool:
        if isinstance(other, Real):
            other = Poly.constant(float(other), self.n)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.key() == other.key()

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        parts = []
        for alpha, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), [-a for a in t[0]])):
            mono = "*".join(
                f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(alpha) if a
            )
            parts.append(f"{c:+g}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " ".join(parts) + ")"

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.n != self.n:
                raise ValueError("polynomials live in different numbers of variables")
            return other
        if isinstance(other, Real):
            return Poly.constant(float(other), self.n)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for alpha, c in other.terms.items():
            terms[alpha] = terms.get(alpha, 0.0) + c
        return Poly(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Real):
            return Poly(self.n, {a: float(other) * c for a, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Exponent, float] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                ab = add_exponents(a, b)
                terms[ab] = terms.get(ab, 0.0) + ca * cb
        return Poly(self.n, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Poly.constant(1.0, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, u) -> float:
        return eval_poly(self, u)


def eval_poly(p: Poly, u: Sequence[float]) -> float:
    """Direct evaluation ``sum_alpha p_alpha u^alpha``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (p.n,):
        raise ValueError(f"point has shape {u.shape}, expected ({p.n},)")
    if not p.terms:
        return 0.0
    exps = np.array(list(p.terms.keys()), dtype=np.int64)
    coefs = np.fromiter(p.terms.values(), dtype=float, count=len(p.terms))
    return float(coefs @ np.prod(u[None, :] ** exps, axis=1))


def variables(n: int) -> list[Poly]:
    """Coordinate polynomials ``x1, ..., xn``."""
    return [Poly.variable(i, n) for i in range(n)]


@dataclass(frozen=True, eq=False)
class Tms:
    """Truncated multi-sequence: dense values indexed by ``monomial_basis(n, d)``."""

    n: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if len(vals) != basis_size(self.n, self.d):
            raise ValueError(
                f"tms of degree {self.d} in {self.n} variables needs "
                f"{basis_size(self.n, self.d)} values, got {len(vals)}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("tms entries must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def basis(self) -> MonomialBasis:
        return monomial_basis(self.n, self.d)

    def __getitem__(self, alpha: Sequence[int]) -> float:
        return float(self.values[basis_index(self.basis, alpha)])

    def __len__(self) -> int:
        return len(self.values)

    def truncate(self, d: int) -> "Tms":
        if d > self.d:
            raise ValueError(f"cannot truncate degree {self.d} tms to degree {d}")
        return Tms(self.n, d, self.values[: basis_size(self.n, d)])

    def __add__(self, other: "Tms") -> "Tms":
        if (self.n, self.d) != (other.n, other.d):
            raise ValueError("tms shapes differ")
        return Tms(self.n, self.d, self.values + other.values)

    def __mul__(self, c: float) -> "Tms":
        return Tms(self.n, self.d, float(c) * self.values)

    __rmul__ = __mul__


def pair(p: Poly, y: Tms) -> float:
    """The Riesz pairing ``<p, y> = sum_alpha p_alpha y_alpha``."""
    if p.n != y.n:
        raise ValueError("variable counts differ")
    if p.deg > y.d:
        raise ValueError(f"polynomial degree {p.deg} exceeds tms degree {y.d}")
    index = y.basis.index
    return float(sum(c * y.values[index[a]] for a, c in p.terms.items()))


def moment_vector(u: Sequence[float], d: int) -> Tms:
    """``[u]_d``: the degree-``d`` moments of the Dirac measure at ``u``."""
    u = np.asarray(u, dtype=float).ravel()
    basis = monomial_basis(len(u), d)
    return Tms(len(u), d, np.prod(u[None, :] ** basis.array, axis=1))


def moment_vectors(points: np.ndarray, d: int) -> np.ndarray:
    """Stacked ``[u_i]_d`` as columns, shape ``(basis_size, len(points))``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    basis = monomial_basis(points.shape[1], d)
    return np.prod(points[:, None, :] ** basis.array[None, :, :], axis=2).T


def atomic_tms(points: Iterable[Sequence[float]], weights: Iterable[float], d: int) -> Tms:
    """``sum_i weights[i] * [points[i]]_d``."""
    points = np.atleast_2d(np.asarray(list(points), dtype=float))
    weights = np.asarray(list(weights), dtype=float)
    return Tms(points.shape[1], d, moment_vectors(points, d) @ weights)


def random_poly(rng: np.random.Generator, n: int, d: int, density: float = 1.0) -> Poly:
    """Polynomial of degree at most ``d`` with standard normal coefficients."""
    basis = monomial_basis(n, d)
    coefs = rng.standard_normal(len(basis))
    if density < 1.0:
        coefs = coefs * (rng.random(len(basis)) < density)
    return Poly(n, dict(zip(basis.exponents, coefs)))


def all_exponents(n: int, d: int) -> Iterable[Exponent]:
    """Brute-force enumeration of ``N^n_d`` (unordered), used as a test oracle."""
    return (a for a in itertools.product(range(d + 1), repeat=n) if sum(a) <= d)
