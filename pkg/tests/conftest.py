import math

import numpy as np
import pytest

from entropy_lmm.measure import build_counting_grid, build_interval_grid, build_real_line_grid
from entropy_lmm.problem import MomentProblem, monomial

GAUSS_BASIS = (monomial(0), monomial(1), monomial(2))


def gaussian_problem(b, n=400, family="boltzmann_shannon"):
    """Gaussian moment problem (basis 1, t, t^2) on the default real-line grid
    with radius 10 sqrt(b3/b1)."""
    radius = 10.0 * math.sqrt(b[2] / b[0])
    return MomentProblem(family, build_real_line_grid(radius, n), GAUSS_BASIS, b)


def quadratic_m1_problem(n=64):
    return MomentProblem("quadratic", build_interval_grid(0.0, 1.0, n), [monomial(0)], [1.0])


def counting_problem(n=50, total=10.0):
    return MomentProblem("boltzmann_shannon_minus_u", build_counting_grid(n), [monomial(0)], [total])


def richardson_slope(fun, s0=1e-3, ratio=10.0, levels=3):
    """One-sided derivative at 0+ of ``fun`` by Richardson extrapolation of
    forward differences at ``s0, s0/ratio, ...``."""
    f0 = fun(0.0)
    steps = [s0 / ratio**k for k in range(levels)]
    table = [(fun(s) - f0) / s for s in steps]
    for k in range(1, levels):
        factor = ratio**k
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
    return table[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_ext_function(rng, n, pos_inf=True, neg_inf=True, nonneg=False):
    """Random grid function with a few infinite nodes."""
    x = rng.normal(scale=3.0, size=n)
    if nonneg:
        x = np.abs(x)
    choices = [v for v, ok in ((math.inf, pos_inf), (-math.inf, neg_inf and not nonneg)) if ok]
    if choices:
        for i in rng.choice(n, size=rng.integers(0, 3), replace=False):
            x[i] = rng.choice(choices)
    return x


def ext_close(a, b, rel=1e-12, abs_=1e-12):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)


def check_integration_rules(rng, n=12):
    """Draw one random pair per integration rule and return the
    three booleans (monotonicity, difference rule, sum rule)."""
    from entropy_lmm.extreal import ext_add, ext_add_array, ext_neg
    from entropy_lmm.measure import build_explicit_measure, integrate

    m = build_explicit_measure(np.arange(float(n)), rng.uniform(0.1, 2.0, n))

    x = random_ext_function(rng, n)
    y = x + np.abs(rng.normal(size=n))
    y[rng.random(n) < 0.1] = math.inf
    mono = integrate(x, m) <= integrate(y, m)

    x = random_ext_function(rng, n, neg_inf=False, nonneg=True)
    y = np.abs(rng.normal(size=n))
    diff = ext_close(
        integrate(ext_add_array(x, -y), m), ext_add(integrate(x, m), ext_neg(integrate(y, m)))
    )

    x = random_ext_function(rng, n, pos_inf=False)
    y = random_ext_function(rng, n, pos_inf=False)
    total = ext_close(integrate(ext_add_array(x, y), m), ext_add(integrate(x, m), integrate(y, m)))
    return mono, diff, total


def feasible_perturbation(xbar, p, rng, eps=0.1):
    """``xbar * (1 + eps * v)`` with ``v`` of sup-norm one chosen so that the
    moments of ``xbar * v`` vanish; keeps the constraints and positivity."""
    import scipy.linalg

    q = scipy.linalg.null_space(p.moment_matrix * xbar)
    v = q @ rng.standard_normal(q.shape[1])
    v /= np.max(np.abs(v))
    return xbar * (1.0 + eps * v)
