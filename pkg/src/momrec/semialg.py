"""Semialgebraic constraint sets.

A set is stored as two tuples of polynomials, equalities ``c(x) = 0`` and
inequalities ``c(x) >= 0``, plus a ``sphere`` flag that adds ``||x||^2 = 1``.
The sphere is kept apart from the generic equalities because the tensor
front-ends require it and the atom extraction renormalises onto it.

The convergence theory behind the relaxations assumes the quadratic module
of the constraints is archimedean.  That is not checked here; adding the
sphere (or a ball constraint ``N - ||x||^2 >= 0``) is the usual way to
guarantee it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Sequence

import numpy as np

from .polycore import Poly, eval_poly

DEFAULT_MEMBERSHIP_TOL = 1e-6


@dataclass(frozen=True)
class SemialgebraicSet:
    n: int
    equalities: tuple[Poly, ...] = field(default_factory=tuple)
    inequalities: tuple[Poly, ...] = field(default_factory=tuple)
    sphere: bool = False

    def __post_init__(self):
        object.__setattr__(self, "equalities", tuple(self.equalities))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        for c in self.equalities + self.inequalities:
            if c.n != self.n:
                raise ValueError(f"constraint {c} is not in {self.n} variables")

    @classmethod
    def whole_space(cls, n: int) -> "SemialgebraicSet":
        return cls(n)

    @classmethod
    def unit_sphere(cls, n: int) -> "SemialgebraicSet":
        return cls(n, sphere=True)

    @classmethod
    def nonnegative_sphere(cls, n: int) -> "SemialgebraicSet":
        """``{x >= 0, ||x|| = 1}``, the set behind completely positive tensors."""
        return cls(n, inequalities=tuple(Poly.variable(i, n) for i in range(n)), sphere=True)

    @property
    def all_equalities(self) -> tuple[Poly, ...]:
        """Generic equalities followed by ``||x||^2 - 1`` when flagged."""
        if self.sphere:
            return self.equalities + (Poly.sphere(self.n),)
        return self.equalities

    @property
    def degree(self) -> int:
        """``d_K = max(1, ceil(deg c / 2))`` over every constraint."""
        degs = [ceil(c.deg / 2) for c in self.all_equalities + self.inequalities]
        return max([1] + degs)

    def with_sphere(self) -> "SemialgebraicSet":
        return SemialgebraicSet(self.n, self.equalities, self.inequalities, True)

    def membership_residual(self, u: Sequence[float]) -> float:
        return membership_residual(self, u)

    def contains(self, u: Sequence[float], tol: float = DEFAULT_MEMBERSHIP_TOL) -> bool:
        return membership_residual(self, u) <= tol


def membership_residual(K: SemialgebraicSet, u: Sequence[float]) -> float:
    """Worst constraint violation at ``u``; zero exactly on ``K``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (K.n,):
        raise ValueError(f"point has shape {u.shape}, expected ({K.n},)")
    res = 0.0
    for c in K.equalities:
        res = max(res, abs(eval_poly(c, u)))
    for c in K.inequalities:
        res = max(res, -eval_poly(c, u))
    if K.sphere:
        res = max(res, abs(float(u @ u) - 1.0))
    return res


def homogeneity_check(K: SemialgebraicSet) -> bool:
    """True when every generic constraint is a homogeneous polynomial."""
    return all(c.is_homogeneous() for c in K.equalities + K.inequalities)
