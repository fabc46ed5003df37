import math
import time

import numpy as np
import pytest

from entropy_lmm.certificate import (
    CertificateOptions,
    best_multipliers,
    certify,
    check_interiority,
    directional_derivative,
    lmm_residual,
    sample_feasible_directions,
)
from entropy_lmm.dual import link_density, solve
from entropy_lmm.entropy import get_entropy
from entropy_lmm.errors import DomainError
from entropy_lmm.measure import build_counting_grid, build_interval_grid, entropy_value, integrate
from entropy_lmm.problem import MomentProblem, gaussian_solution, monomial

from conftest import (
    counting_problem,
    feasible_perturbation,
    gaussian_problem,
    quadratic_m1_problem,
    richardson_slope,
)

BS = get_entropy("boltzmann_shannon")
ALPHA_STD = np.array([1.0 - math.log(math.sqrt(2 * math.pi)), 0.0, -0.5])


@pytest.fixture(scope="module")
def std():
    p = gaussian_problem((1.0, 0.0, 1.0))
    return p, gaussian_solution((1.0, 0.0, 1.0)).density(p.measure.nodes)


class TestDirectionalDerivative:
    def test_same_point(self, std):
        p, x = std
        assert directional_derivative(x, x, BS, p.measure) == 0.0

    def test_matches_finite_differences(self, std):
        p, xbar = std
        t = p.measure.nodes
        x = np.exp(-0.5 * (t - 0.5) ** 2) / math.sqrt(2 * math.pi)
        dd = directional_derivative(xbar, x, BS, p.measure)
        fd = richardson_slope(lambda s: entropy_value(BS, xbar + s * (x - xbar), p.measure))
        assert dd == pytest.approx(fd, rel=1e-5)

    def test_boundary_node_gives_minus_infinity(self):
        m = build_counting_grid(3)
        assert directional_derivative([0.0, 1.0, 1.0], [0.5, 1.0, 1.0], BS, m) == -math.inf

    def test_zero_increment_at_boundary_node(self):
        m = build_counting_grid(3)
        assert directional_derivative([0.0, 1.0, 1.0], [0.0, 2.0, 1.0], BS, m) == pytest.approx(1.0)

    def test_infinite_entropy_rejected(self):
        m = build_counting_grid(2)
        with pytest.raises(DomainError):
            directional_derivative([-1.0, 1.0], [1.0, 1.0], BS, m)

    def test_convexity_bound(self, rng):
        m = build_interval_grid(0.0, 1.0, 40)
        for _ in range(50):
            xbar, x = rng.uniform(0.01, 3.0, (2, 40))
            dd = directional_derivative(xbar, x, BS, m)
            assert dd <= entropy_value(BS, x, m) - entropy_value(BS, xbar, m) + 1e-12


class TestLmmResidual:
    def test_link_inversion(self, rng):
        p = gaussian_problem((1.0, 0.0, 1.0))
        for _ in range(5):
            alpha = ALPHA_STD + 0.05 * rng.normal(size=3)
            x = link_density(alpha, p)
            assert lmm_residual(x, alpha, p) <= 1e-12 * 100

    def test_closed_form(self, std):
        p, x = std
        assert lmm_residual(x, ALPHA_STD, p) <= 1e-9

    def test_zero_alpha(self, std):
        p, x = std
        assert lmm_residual(x, np.zeros(3), p) > 1.0

    def test_boundary(self):
        p = MomentProblem("boltzmann_shannon", build_counting_grid(2), [monomial(0)], [1.0])
        with pytest.raises(DomainError):
            lmm_residual([0.0, 1.0], [0.0], p)


class TestBestMultipliers:
    def test_recovers_alpha(self):
        p = gaussian_problem((1.0, 0.0, 1.0))
        alpha0 = np.array([0.3, 0.2, -0.4])
        np.testing.assert_allclose(best_multipliers(link_density(alpha0, p), p), alpha0, atol=1e-10)

    def test_gaussian(self, std):
        p, x = std
        np.testing.assert_allclose(best_multipliers(x, p), ALPHA_STD, atol=1e-10)

    def test_strict_subspace(self, std):
        p, x = std
        sub = MomentProblem("boltzmann_shannon", p.measure, [monomial(0), monomial(1)], [1.0, 0.0])
        alpha = best_multipliers(x, sub)
        assert lmm_residual(x, alpha, sub) > 1.0


class TestDirections:
    def test_counting_two_nodes(self):
        p = MomentProblem("quadratic", build_counting_grid(2), [monomial(0)], [1.0])
        (u,) = sample_feasible_directions(p, 1)
        assert u[0] == pytest.approx(-u[1])
        assert np.linalg.norm(u) == pytest.approx(1.0)

    def test_in_null_space(self, std):
        p, _ = std
        for u in sample_feasible_directions(p, 64, seed=3):
            assert np.max(np.abs(p.moment_matrix @ u)) <= 1e-10

    def test_deterministic(self, std):
        p, _ = std
        a = sample_feasible_directions(p, 16, seed=7)
        b = sample_feasible_directions(p, 16, seed=7)
        assert all(np.array_equal(u, v) for u, v in zip(a, b))

    def test_full_basis_first(self):
        p = quadratic_m1_problem(8)
        dirs = sample_feasible_directions(p, 10)
        gram = np.array(dirs[:7]) @ np.array(dirs[:7]).T
        np.testing.assert_allclose(gram, np.eye(7), atol=1e-12)

    def test_bad_count(self, std):
        with pytest.raises(ValueError):
            sample_feasible_directions(std[0], 0)


class TestInteriority:
    def test_examples(self, std):
        assert check_interiority(std[1], BS) == (True, [])
        assert check_interiority([1.0, 0.0, 2.0], BS) == (False, [1])
        assert check_interiority(np.zeros(4), get_entropy("quadratic")) == (True, [])


class TestCertify:
    def test_solve_output(self):
        p = gaussian_problem((1.0, 0.0, 1.0))
        rep = solve(p)
        start = time.perf_counter()
        st = certify(rep.x_values, p, rep.alpha)
        assert time.perf_counter() - start < 0.5
        assert st.verdict == "certified_optimal" and st.certified_by == "multipliers"
        assert st.lmm_residual <= 1e-9

    def test_without_alpha(self, std):
        p, x = std
        assert certify(x, p).verdict == "certified_optimal"

    def test_perturbation_refuted(self, std, rng):
        p, x = std
        y = feasible_perturbation(x, p, rng)
        st = certify(y, p)
        assert st.verdict == "feasible_not_certified"
        assert st.min_directional_derivative < -1e-6
        assert entropy_value(BS, y, p.measure) > entropy_value(BS, x, p.measure)

    def test_wrong_moments(self, std):
        p, x = std
        assert certify(2 * x, p).verdict == "infeasible"

    def test_outside_domain(self):
        p = counting_problem(3, 3.0)
        st = certify([2.0, 2.0, -1.0], p)
        assert st.verdict == "infeasible" and not st.feasible

    def test_directions_route(self):
        # quadratic on a small grid: the null space is spanned by the sample
        p = quadratic_m1_problem(8)
        st = certify(np.ones(8), p, alpha=np.array([5.0]), opts=CertificateOptions(directions=16))
        assert st.verdict == "certified_optimal" and st.certified_by == "directions"

    def test_trivial_cone(self):
        p = counting_problem(4, 0.0)
        st = certify(np.zeros(4), p)
        assert st.verdict == "certified_optimal" and st.certified_by == "trivial_cone"

    def test_soundness(self, rng):
        for p in (gaussian_problem((2.0, 0.7, 3.0)), counting_problem(), quadratic_m1_problem()):
            rep = solve(p)
            assert lmm_residual(rep.x_values, rep.alpha, p) <= 1e-10
            slope = p.entropy.dphi(rep.x_values)
            for u in sample_feasible_directions(p, 16, seed=1):
                pairing = integrate(slope * u, p.measure)
                scale = integrate(np.abs(u), p.measure)
                assert abs(pairing) <= p.m * 1e-10 * max(scale, 1.0)

    def test_json(self, std):
        data = certify(std[1], std[0]).to_json()
        assert data["verdict"] == "certified_optimal"
        assert len(data["alpha"]) == 3


def test_grid_annihilation(rng):
    # pairing against every unit grid function recovers y node by node
    m = build_interval_grid(0.0, 1.0, 20)
    for _ in range(20):
        y = rng.normal(size=20) * (rng.random(20) < 0.5)
        pairings = np.array([integrate(y * e, m) for e in np.eye(20)])
        assert np.array_equal(pairings == 0.0, y == 0.0)
    assert all(integrate(np.zeros(20) * e, m) == 0.0 for e in np.eye(20))
