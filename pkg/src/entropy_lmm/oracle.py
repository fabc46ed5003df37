"""Brute-force primal solver used to cross-check the dual solver.

The oracle works directly on the node values ``x`` of the discretized
problem and never forms multipliers as unknowns, link densities or the dual
Jacobian. Each step is a projected gradient step in the local metric
``diag(phi''(x))``: the gradient ``phi'(x)`` is scaled by ``1 / phi''(x)``
and projected onto the directions that keep (or restore) the moment
constraints. Step sizes adapt by doubling on success and halving when an
iterate would leave ``int(dom phi)`` or fail the sufficient-decrease test.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .errors import NoInteriorPoint, NotConverged
from .measure import entropy_value
from .problem import feasibility_residual

__all__ = ["OracleOptions", "OracleResult", "affine_project", "primal_solve", "compare"]

log = logging.getLogger(__name__)

FEASIBLE_RESIDUAL = 1e-10


@dataclass(frozen=True)
class OracleOptions:
    step: float = 1e-2
    max_iter: int = 200_000
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if not (self.step > 0 and self.tol > 0 and self.max_iter >= 1):
            raise ValueError("oracle options must be positive")


@dataclass
class OracleResult:
    x: np.ndarray
    objective: float
    iterations: int
    objective_history: list = field(default_factory=list)
    max_residual_history: list = field(default_factory=list)


def _solve_small(mat, rhs):
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    return sol


def affine_project(x, p):
    """Closest point to ``x`` in ``{y : Psi(y) = b}`` in the weighted norm.

    The correction lies in the span of the basis functions:
    ``y = x + sum_k lam_k psi_k``. One refinement pass removes rounding.
    """
    y = p.measure.check(x, "density").copy()
    a = p.moment_matrix
    gram = a @ p.psi.T
    for _ in range(2):
        r = p.targets - a @ y
        y = y + p.psi.T @ _solve_small(gram, r)
    return y


def _start_density(p, rng):
    f = p.entropy
    w = p.measure.weights
    c = None
    for row, target in zip(p.psi, p.targets):
        mass = float(np.sum(w * row))
        if np.all(row > 0) and mass > 0:
            c = target / mass
            break
    if c is None or not f.interior_mask(c):
        c = f.interior_point()
    h = c * (0.5 + rng.random(p.measure.n))
    if np.isfinite(f.hi) or np.isfinite(f.lo):
        lo = f.lo if np.isfinite(f.lo) else -np.inf
        hi = f.hi if np.isfinite(f.hi) else np.inf
        span = (hi - lo) if np.isfinite(hi - lo) else 1.0
        h = np.clip(h, lo + 1e-3 * span, hi - 1e-3 * span)
    return h


def _scaled_direction(x, p):
    """Direction ``d = -D (phi'(x) - psi^T lam)`` with ``D = 1 / phi''(x)``,
    where ``lam`` makes ``Psi(x + d) = b``."""
    f = p.entropy
    g = f.dphi(x)
    scale = 1.0 / f.d2phi(x)
    a = p.moment_matrix
    ad = a * scale
    r = p.targets - a @ x
    lam = _solve_small(ad @ p.psi.T, r + ad @ g)
    v = g - p.psi.T @ lam
    d = -scale * v
    decrement = float(np.sum(p.measure.weights * scale * v * v))
    return d, g, decrement, r


def primal_solve(p, opts=None):
    """Minimize ``sum_i w_i phi(x_i)`` over ``Psi(x) = b`` directly in ``x``.

    Starts from a seeded positive heuristic density (projected onto the
    constraints when that keeps it interior) and runs until the predicted
    objective decrease falls below ``opts.tol``.
    """
    opts = opts or OracleOptions()
    f, measure = p.entropy, p.measure
    w = measure.weights

    if f.nonnegative and f.lo_closed and np.all(p.targets == 0.0):
        if any(np.all(row > 0) for row in p.psi):
            x = np.zeros(measure.n)
            return OracleResult(x, entropy_value(f, x, measure), 0, [0.0], [0.0])

    rng = np.random.default_rng(opts.seed)
    x = _start_density(p, rng)
    projected = affine_project(x, p)
    if np.all(f.interior_mask(projected)):
        x = projected

    step = min(opts.step, 1.0)
    objective = entropy_value(f, x, measure)
    history, residuals = [], []
    feasible = False
    for it in range(opts.max_iter):
        d, g, decrement, r = _scaled_direction(x, p)
        res = float(np.max(np.abs(r)))
        if not feasible and res <= FEASIBLE_RESIDUAL:
            feasible = True
            history.append(objective)
            residuals.append(res)
        if feasible and 0.5 * decrement <= opts.tol:
            x_new = x + d
            if np.all(f.interior_mask(x_new)):
                obj_new = entropy_value(f, x_new, measure)
                if obj_new <= objective:
                    x, objective = x_new, obj_new
                    history.append(objective)
                    residuals.append(float(np.max(np.abs(feasibility_residual(x, p)))))
            return OracleResult(x, objective, it + 1, history, residuals)

        slope = float(np.sum(w * g * d))
        t = step
        while True:
            x_new = x + t * d
            if np.all(f.interior_mask(x_new)):
                obj_new = entropy_value(f, x_new, measure)
                if not feasible or obj_new <= objective + 1e-4 * t * slope:
                    break
            t *= 0.5
            if t < 1e-300:
                if not feasible:
                    raise NoInteriorPoint(
                        f"could not reach the feasible set inside int(dom phi) "
                        f"(residual {res:.3e} at iteration {it})"
                    )
                raise NotConverged(f"oracle step collapsed at iteration {it}")
        x, objective = x_new, obj_new
        step = min(1.0, 2.0 * t)
        if feasible:
            history.append(objective)
            residuals.append(float(np.max(np.abs(feasibility_residual(x, p)))))
    if not feasible:
        raise NoInteriorPoint("no interior feasible point within the iteration budget")
    raise NotConverged(f"oracle did not converge in {opts.max_iter} iterations")


def compare(report, oracle_x, p, sup_tol=1e-4, objective_tol=1e-6):
    """Distances between the dual solution and an oracle solution."""
    x_dual = p.measure.check(report.x_values, "dual solution")
    x_oracle = p.measure.check(oracle_x, "oracle solution")
    diff = np.abs(x_dual - x_oracle)
    obj_oracle = entropy_value(p.entropy, x_oracle, p.measure)
    gap = abs(report.entropy - obj_oracle)
    if math.isnan(gap):
        gap = 0.0 if report.entropy == obj_oracle else math.inf
    sup = float(diff.max())
    return {
        "sup_diff": sup,
        "l1_diff": float(np.sum(p.measure.weights * diff)),
        "objective_dual": float(report.entropy),
        "objective_oracle": float(obj_oracle),
        "objective_gap": float(gap),
        "sup_tol": sup_tol,
        "objective_tol": objective_tol,
        "agree": bool(sup <= sup_tol and gap <= objective_tol),
    }
