import math

import numpy as np
import pytest

from entropy_lmm.dual import solve
from entropy_lmm.errors import LengthMismatch, NotConverged
from entropy_lmm.measure import build_interval_grid
from entropy_lmm.oracle import OracleOptions, affine_project, compare, primal_solve
from entropy_lmm.problem import MomentProblem, feasibility_residual, gaussian_solution, monomial

from conftest import counting_problem, gaussian_problem, quadratic_m1_problem


class TestAffineProject:
    def test_feasible_unchanged(self):
        p = gaussian_problem((1.0, 0.0, 1.0))
        x = gaussian_solution((1.0, 0.0, 1.0)).density(p.measure.nodes)
        x = affine_project(x, p)
        np.testing.assert_allclose(affine_project(x, p), x, atol=1e-12)

    def test_zero_to_constant(self):
        np.testing.assert_allclose(affine_project(np.zeros(64), quadratic_m1_problem()), 1.0, rtol=1e-13)

    def test_idempotent_and_feasible(self, rng):
        m = build_interval_grid(-1.0, 2.0, 40)
        p = MomentProblem("quadratic", m, [monomial(0), monomial(1), monomial(2)], [1.0, 0.3, 0.8])
        for _ in range(20):
            y = affine_project(rng.normal(size=40), p)
            assert np.max(np.abs(feasibility_residual(y, p))) <= 1e-10
            np.testing.assert_allclose(affine_project(y, p), y, atol=1e-12)


class TestPrimalSolve:
    def test_quadratic(self):
        res = primal_solve(quadratic_m1_problem())
        np.testing.assert_allclose(res.x, 1.0, atol=1e-6)
        assert res.objective == pytest.approx(0.5, abs=1e-10)

    def test_gaussian(self):
        p = gaussian_problem((1.0, 0.0, 1.0))
        res = primal_solve(p)
        g = gaussian_solution((1.0, 0.0, 1.0))
        assert np.max(np.abs(res.x - g.density(p.measure.nodes))) <= 1e-4
        assert res.objective == pytest.approx(-math.log(math.sqrt(2 * math.pi * math.e)), abs=1e-6)

    def test_origin(self):
        res = primal_solve(gaussian_problem((1.0, 0.0, 1.0)).with_targets([0.0, 0.0, 0.0]))
        assert np.all(res.x == 0.0) and res.objective == 0.0

    def test_counting(self):
        res = primal_solve(counting_problem())
        np.testing.assert_allclose(res.x, 0.2, atol=1e-6)

    def test_monotone_and_feasible(self):
        res = primal_solve(gaussian_problem((2.0, 0.7, 3.0)))
        h = res.objective_history
        assert all(b <= a for a, b in zip(h, h[1:]))
        assert max(res.max_residual_history) <= 1e-9

    def test_seeded(self):
        p = counting_problem()
        a = primal_solve(p, OracleOptions(seed=4))
        b = primal_solve(p, OracleOptions(seed=4))
        assert np.array_equal(a.x, b.x)

    def test_budget(self):
        with pytest.raises(NotConverged):
            primal_solve(counting_problem(), OracleOptions(max_iter=2))

    def test_bad_options(self):
        with pytest.raises(ValueError):
            OracleOptions(step=0.0)


class TestCompare:
    def test_identical(self):
        p = quadratic_m1_problem()
        rep = solve(p)
        out = compare(rep, rep.x_values, p)
        assert out["sup_diff"] == 0.0 and out["objective_gap"] == 0.0 and out["agree"]

    def test_quadratic(self):
        p = quadratic_m1_problem()
        out = compare(solve(p), primal_solve(p).x, p)
        assert out["sup_diff"] <= 1e-8 and out["agree"]

    def test_gaussian(self):
        p = gaussian_problem((1.0, 0.0, 1.0))
        out = compare(solve(p), primal_solve(p).x, p)
        assert out["objective_gap"] <= 1e-6 and out["agree"]

    def test_disagree(self):
        p = quadratic_m1_problem()
        out = compare(solve(p), np.full(64, 1.1), p)
        assert not out["agree"]

    def test_length_mismatch(self):
        p = quadratic_m1_problem()
        with pytest.raises(LengthMismatch):
            compare(solve(p), np.ones(3), p)
