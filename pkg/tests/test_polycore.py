import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momrec.polycore import (Poly, Tms, all_exponents, atomic_tms, basis_index, basis_monomial,
                             basis_size, eval_poly, monomial_basis, moment_vector, moment_vectors,
                             pair, random_poly, variables)


# -- monomial bases ---------------------------------------------------------

def test_basis_index_constant_first():
    assert basis_index(monomial_basis(2, 2), (0, 0)) == 0


def test_basis_index_order_two_variables():
    B = monomial_basis(2, 2)
    assert B.exponents == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert basis_index(B, (1, 1)) == 4


def _brute_force_order(n, d):
    # graded, then lexicographically descending
    return sorted(all_exponents(n, d), key=lambda a: (sum(a), tuple(-v for v in a)))


def test_basis_index_matches_brute_force():
    B = monomial_basis(3, 2)
    order = _brute_force_order(3, 2)
    assert order.index((0, 0, 2)) == 9
    assert basis_index(B, (0, 0, 2)) == 9
    for n, d in [(1, 4), (2, 3), (3, 3), (4, 2), (5, 3)]:
        assert monomial_basis(n, d).exponents == _brute_force_order(n, d)


@pytest.mark.parametrize("n,d", [(1, 3), (2, 4), (3, 3), (4, 3)])
def test_basis_size_and_inverse(n, d):
    B = monomial_basis(n, d)
    assert len(B) == comb(n + d, d) == basis_size(n, d)
    for pos in range(len(B)):
        assert basis_index(B, basis_monomial(B, pos)) == pos


def test_basis_is_prefix_of_higher_degree():
    low, high = monomial_basis(3, 2), monomial_basis(3, 4)
    assert high.exponents[: len(low)] == low.exponents


def test_basis_index_errors():
    B = monomial_basis(2, 2)
    with pytest.raises(ValueError):
        basis_index(B, (2, 1))
    with pytest.raises(ValueError):
        basis_index(B, (1, 0, 0))


# -- polynomials -----------------------------------------------------------

def test_poly_drops_tiny_and_zero_terms():
    p = Poly(2, {(1, 0): 1e-16, (0, 1): 0.0, (1, 1): 2.0})
    assert dict(p.terms) == {(1, 1): 2.0}
    assert p.deg == 2
    x1, x2 = variables(2)
    assert (x1 - x1).terms == {} and (x1 - x1).deg == 0


def test_poly_rejects_bad_exponents():
    with pytest.raises(ValueError):
        Poly(2, {(1,): 1.0})
    with pytest.raises(ValueError):
        Poly(2, {(1, -1): 1.0})


def test_homogeneity_flag():
    x1, x2 = variables(2)
    assert (x1 * x2 - x2 ** 2).is_homogeneous()
    assert not (x1 ** 2 + x2).is_homogeneous()


def _coef_dict(p):
    return dict(p.terms)


def _brute_mul(p, q):
    out = {}
    for a, c in p.terms.items():
        for b, e in q.terms.items():
            k = tuple(x + y for x, y in zip(a, b))
            out[k] = out.get(k, 0.0) + c * e
    return out


def test_arithmetic_matches_coefficient_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(1, 4))
        p = random_poly(rng, n, int(rng.integers(0, 5)), density=0.6)
        q = random_poly(rng, n, int(rng.integers(0, 5)), density=0.6)
        s = float(rng.standard_normal())
        add = p + q
        for a in set(p.terms) | set(q.terms):
            assert add.terms.get(a, 0.0) == pytest.approx(p.terms.get(a, 0.0) + q.terms.get(a, 0.0), abs=1e-13)
        prod = p * q
        brute = _brute_mul(p, q)
        for a in set(brute) | set(prod.terms):
            assert prod.terms.get(a, 0.0) == pytest.approx(brute.get(a, 0.0), abs=1e-12)
        scaled = p * s
        for a, c in p.terms.items():
            assert scaled.terms.get(a, 0.0) == pytest.approx(s * c, abs=1e-13)


def test_power_and_content_hash():
    x1, x2 = variables(2)
    p = (x1 + x2) ** 3
    assert _coef_dict(p) == {(3, 0): 1.0, (2, 1): 3.0, (1, 2): 3.0, (0, 3): 1.0}
    assert hash(p) == hash(x1 ** 3 + 3 * x1 ** 2 * x2 + 3 * x1 * x2 ** 2 + x2 ** 3)
    assert p == x1 ** 3 + 3 * x1 ** 2 * x2 + 3 * x1 * x2 ** 2 + x2 ** 3


def test_coefficients_vector_roundtrip():
    rng = np.random.default_rng(0)
    p = random_poly(rng, 3, 3)
    vec = p.coefficients(4)
    assert len(vec) == basis_size(3, 4)
    assert Poly.from_coefficients(vec, 3, 4) == p
    with pytest.raises(ValueError):
        p.coefficients(2)


# -- evaluation ------------------------------------------------------------

def test_eval_direct_sum():
    x1, x2 = variables(2)
    assert eval_poly(x1 ** 2 + x2 ** 2, (3, 4)) == 25.0


def test_eval_sphere_identity():
    rng = np.random.default_rng(1)
    u = rng.standard_normal(5)
    u /= np.linalg.norm(u)
    assert abs(eval_poly(Poly.sphere(5), u)) <= 1e-15


def test_eval_reference_atom():
    x1, x2, _, _ = variables(4)
    u1 = (0.6920, 0.1453, 0.6920, 0.1453)
    # 0.6920^4 - 0.1453^4 by hand
    assert eval_poly(x1 ** 4 - x2 ** 4, u1) == pytest.approx(0.2289, abs=1e-3)
    assert eval_poly(x1 ** 4 - x2 ** 4, u1) == pytest.approx(0.6920 ** 4 - 0.1453 ** 4, abs=1e-15)


def test_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_poly(Poly.sphere(3), (1.0, 0.0))


# -- tms and pairing -------------------------------------------------------

def test_pair_constant_picks_zeroth_moment():
    rng = np.random.default_rng(0)
    y = Tms(3, 2, rng.standard_normal(basis_size(3, 2)))
    assert pair(Poly.constant(1.0, 3), y) == y.values[0]


def test_pair_reference_measure():
    x1, x2, _, _ = variables(4)
    y = atomic_tms([(0.6920, 0.1453, 0.6920, 0.1453), (0.1954, 0.6796, 0.1954, 0.6796)],
                   [36.0156, 29.4743], 4)
    assert pair(x1 ** 3 * x2 - x1 ** 2 * x2 ** 2, y) == pytest.approx(1.0, abs=2e-2)


def test_pair_against_direct_evaluation():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n, d = int(rng.integers(1, 5)), int(rng.integers(0, 5))
        U = rng.standard_normal((3, n))
        c = rng.standard_normal(3)
        y = atomic_tms(U, c, d)
        p = random_poly(rng, n, d)
        assert pair(p, y) == pytest.approx(sum(ci * eval_poly(p, u) for ci, u in zip(c, U)), rel=1e-12, abs=1e-12)


def test_pair_degree_mismatch():
    y = Tms(2, 2, np.zeros(6))
    x1, _ = variables(2)
    with pytest.raises(ValueError):
        pair(x1 ** 3, y)


# pairing is bilinear
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(-5, 5), st.floats(-5, 5))
def test_pair_bilinear(seed, a, b):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 4)), int(rng.integers(0, 4))
    p, q = random_poly(rng, n, d), random_poly(rng, n, d)
    y, z = (Tms(n, d, rng.standard_normal(basis_size(n, d))) for _ in range(2))
    lhs = pair(p * a + q * b, y)
    rhs = a * pair(p, y) + b * pair(q, y)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-11)
    assert pair(p, y * a + z * b) == pytest.approx(a * pair(p, y) + b * pair(p, z), rel=1e-12, abs=1e-11)


def test_moment_vector_trivial_cases():
    assert np.array_equal(moment_vector((0.0, 0.0), 2).values, [1, 0, 0, 0, 0, 0])
    assert np.array_equal(moment_vector((1.0, 1.0), 2).values, np.ones(6))
    assert moment_vector((0.3, -2.0, 5.0), 3).values[0] == 1.0


def test_moment_vector_evaluation_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n, d = int(rng.integers(1, 5)), int(rng.integers(0, 5))
        u = rng.standard_normal(n)
        p = random_poly(rng, n, d)
        assert pair(p, moment_vector(u, d)) == pytest.approx(eval_poly(p, u), rel=1e-12, abs=1e-12)


def test_moment_vectors_columns():
    rng = np.random.default_rng(2)
    U = rng.standard_normal((4, 3))
    V = moment_vectors(U, 3)
    for i, u in enumerate(U):
        assert np.allclose(V[:, i], moment_vector(u, 3).values)


def test_tms_validation_and_truncation():
    with pytest.raises(ValueError):
        Tms(2, 2, np.zeros(5))
    with pytest.raises(ValueError):
        Tms(1, 1, [1.0, np.nan])
    y = moment_vector((0.5, 2.0), 4)
    assert np.array_equal(y.truncate(2).values, moment_vector((0.5, 2.0), 2).values)
    assert y[(1, 1)] == 1.0
    with pytest.raises(ValueError):
        y.truncate(5)


def test_values_are_read_only():
    y = moment_vector((1.0, 2.0), 2)
    with pytest.raises(ValueError):
        y.values[0] = 3.0


def test_all_exponents_oracle_count():
    for n, d in itertools.product(range(1, 4), range(0, 4)):
        assert len(list(all_exponents(n, d))) == comb(n + d, d)
