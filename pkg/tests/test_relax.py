import numpy as np
import pytest

import momrec.extract as ex
from momrec.polycore import Poly, eval_poly, random_poly, variables
from momrec.relax import (HierarchyOptions, MrpProblem, Outcome, assemble_mrp, assemble_tensor_pair,
                          generic_objective, ideal_rows, run_hierarchy)
from momrec.sdp import Status, solve
from momrec.semialg import SemialgebraicSet
from reference import separated_sphere_points


def _planted(rng, n, m, d, r, K=None):
    K = K or SemialgebraicSet.unit_sphere(n)
    U = separated_sphere_points(rng, r, n)
    lam = rng.uniform(0.5, 1.5, r)
    polys = [random_poly(rng, n, d) for _ in range(m)]
    funcs = [(p, sum(l * eval_poly(p, u) for l, u in zip(lam, U))) for p in polys]
    return MrpProblem(K, funcs)


def test_hand_assembled_interval():
    (x,) = variables(1)
    K = SemialgebraicSet(1, inequalities=(1 - x ** 2,))
    prob = MrpProblem(K, [(x, 0.5)])
    R = Poly.constant(1.0, 1) + x ** 2
    prog = assemble_mrp(prob, R, 1)
    assert prog.m_y == 3
    assert [b.size for b in prog.blocks] == [2, 1]
    assert prog.n_rows == 1
    assert prog.F.toarray().tolist() == [[0.0, 1.0, 0.0]]
    assert np.array_equal(prog.c, [1.0, 0.0, 1.0])
    y = np.array([1.0, 0.5, 0.25])
    assert np.allclose(prog.blocks[0].value(y), [[1.0, 0.5], [0.5, 0.25]])
    assert np.allclose(prog.blocks[1].value(y), [[0.75]])


def test_ideal_rows_are_localizing_entries():
    x1, x2 = variables(2)
    rows = ideal_rows(x1 - x2, 2)
    assert rows.shape == (6, 15)
    # first row is <x1 - x2, w>
    assert rows[0].toarray()[0, 1] == 1.0 and rows[0].toarray()[0, 2] == -1.0


def test_generic_objective_is_positive_gram():
    obj = generic_objective(3, 4, seed=0)
    assert obj.G.shape == (10, 10)
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert eval_poly(obj.R, rng.standard_normal(3)) > 0
    again = generic_objective(3, 4, seed=0)
    assert np.array_equal(again.G, obj.G)
    with pytest.raises(ValueError):
        generic_objective(3, 3)


def test_minimal_order():
    x1, x2, x3 = variables(3)
    prob = MrpProblem(SemialgebraicSet.unit_sphere(3), [(x1 ** 3, 0.0)])
    assert prob.d1 == 4 and prob.k_min == 2
    with pytest.raises(ValueError):
        run_hierarchy(prob, k_min=1)


def test_planted_recovery_satisfies_functionals():
    rng = np.random.default_rng(0)
    for _ in range(3):
        prob = _planted(rng, 3, 4, 2, 2)
        rep = run_hierarchy(prob, seed=0)
        assert rep.outcome is Outcome.RECOVERED
        assert rep.functional_residual <= 1e-6
        assert 1 <= rep.r <= prob.m
        for m in rep.measures:
            assert np.all(m.weights > 0)
            assert np.all(np.abs(np.linalg.norm(m.atoms, axis=1) - 1) <= 1e-6)


def test_single_atom_recovered_exactly():
    # moments up to degree 2 of one atom pin it down on the sphere
    rng = np.random.default_rng(1)
    u = separated_sphere_points(rng, 1, 3)[0]
    from momrec.polycore import all_exponents
    funcs = [(Poly(3, {a: 1.0}), float(np.prod(u ** np.array(a)))) for a in all_exponents(3, 2)]
    rep = run_hierarchy(MrpProblem(SemialgebraicSet.unit_sphere(3), funcs), seed=0)
    assert rep.recovered and rep.r == 1
    assert np.allclose(rep.measures[0].atoms[0], u, atol=1e-6)
    assert rep.measures[0].weights[0] == pytest.approx(1.0, abs=1e-6)


def test_zero_measure_branch_skips_extraction(monkeypatch):
    def boom(*args, **kwargs):
        raise AssertionError("extraction must not run")

    monkeypatch.setattr(ex, "extract_atoms", boom)
    prob = MrpProblem(SemialgebraicSet.unit_sphere(2), [(Poly.constant(1.0, 2), 0.0)])
    rep = run_hierarchy(prob, seed=0)
    assert rep.recovered and rep.r == 0
    assert rep.records[-1].zero == [True]


def test_empty_signed_pair_gives_zero_measures():
    K = SemialgebraicSet.unit_sphere(3)
    prob = MrpProblem(K, [], signed=True)
    rep = run_hierarchy(prob, seed=0, k_min=1)
    assert rep.recovered and rep.r == 0 and len(rep.measures) == 2


def test_infeasible_mass():
    prob = MrpProblem(SemialgebraicSet.unit_sphere(2), [(Poly.constant(1.0, 2), -1.0)])
    rep = run_hierarchy(prob, seed=0)
    assert rep.outcome is Outcome.INFEASIBLE
    assert rep.records[0].status == str(Status.INFEASIBLE)


def test_deterministic_for_fixed_seed():
    rng = np.random.default_rng(2)
    prob = _planted(rng, 3, 4, 2, 2)
    a, b = run_hierarchy(prob, seed=3), run_hierarchy(prob, seed=3)
    assert np.array_equal(a.measures[0].atoms, b.measures[0].atoms)
    assert np.array_equal(a.measures[0].weights, b.measures[0].weights)


def test_objective_values_increase_with_order():
    rng = np.random.default_rng(4)
    prob = _planted(rng, 3, 3, 2, 2)
    obj = generic_objective(3, prob.d1, seed=0)
    phis = [solve(assemble_mrp(prob, obj.R, k)).phi for k in (1, 2, 3)]
    assert phis[0] <= phis[1] + 1e-6 and phis[1] <= phis[2] + 1e-6


def test_pair_assembly_requires_homogeneous_sphere_set():
    x1, x2 = variables(2)
    prob = MrpProblem(SemialgebraicSet(2, equalities=(x1 - 1,)), [(x1 * x2, 1.0)], signed=True)
    R = generic_objective(2, 2, seed=0).R
    with pytest.raises(ValueError):
        assemble_tensor_pair(prob, R, R, 1)
    good = MrpProblem(SemialgebraicSet.unit_sphere(2), [(x1 * x2, 1.0)], signed=True)
    prog = assemble_tensor_pair(good, R, R, 1)
    assert prog.m_y == 12 and len(prog.blocks) == 2
    assert np.array_equal(prog.F.toarray()[0, :6], -prog.F.toarray()[0, 6:])


def test_rank_tolerance_option_is_used():
    rng = np.random.default_rng(5)
    prob = _planted(rng, 3, 4, 2, 2)
    rep = run_hierarchy(prob, seed=0, options=HierarchyOptions(rank_tol=1e-6))
    assert rep.recovered
    assert all(lo == hi for lo, hi in rep.records[-1].ranks)
