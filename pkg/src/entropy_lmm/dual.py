"""Lagrange multipliers by damped Newton iteration on the moment equations.

For multipliers ``alpha`` the candidate density is
``x(alpha) = link(sum_k alpha_k psi_k)``, which satisfies the multiplier
identity ``phi'(x) = sum_k alpha_k psi_k`` at every node by construction.
:func:`solve` looks for the ``alpha`` with ``Psi(x(alpha)) = b``. The moment
map ``G(alpha) = Psi(x(alpha))`` is the gradient of the smooth convex dual
``alpha -> sum_i w_i phi*(s_i)``, so its Jacobian is a link-weighted Gram
matrix of the basis and is positive definite when the basis has full rank.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
import scipy.linalg

from .certificate import lmm_residual
from .entropy import MAX_FLOAT
from .errors import DomainError, InfeasibleTargets, InitFailure, LinkDomainError, NotConverged
from .measure import entropy_value
from .problem import (
    FEASIBLE_INTERIOR,
    ORIGIN,
    classify_gaussian_feasibility,
    gaussian_solution,
    is_gaussian_configuration,
)

__all__ = [
    "SolverOptions",
    "SolveReport",
    "link_density",
    "moment_map",
    "jacobian",
    "init_multipliers",
    "solve",
    "ZEROS",
    "LSQ",
]

log = logging.getLogger(__name__)

ZEROS = "zeros"
LSQ = "lsq"
INIT_STRATEGIES = (ZEROS, LSQ)


@dataclass(frozen=True)
class SolverOptions:
    tol_moments: float = 1e-10
    max_iter: int = 100
    init: str = LSQ
    max_halvings: int = 60
    armijo: float = 1e-4

    def __post_init__(self):
        if not self.tol_moments > 0:
            raise ValueError("tol_moments must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be an integer >= 1")
        if self.init not in INIT_STRATEGIES:
            raise ValueError(f"init must be one of {INIT_STRATEGIES}, got {self.init!r}")


@dataclass
class SolveReport:
    """Outcome of :func:`solve`.

    ``alpha`` is ``None`` for the zero-target short cut, where the optimum
    ``x = 0`` sits on the boundary of ``dom phi`` and has no multiplier
    representation.
    """

    x_values: np.ndarray
    alpha: np.ndarray
    entropy: float
    moment_residual: np.ndarray
    lmm_residual: float
    iterations: int
    converged: bool
    residual_history: list = field(default_factory=list)
    message: str = ""

    @property
    def max_residual(self):
        return float(np.max(np.abs(self.moment_residual)))

    def to_json(self):
        return {
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "entropy": float(self.entropy),
            "alpha": None if self.alpha is None else [float(a) for a in self.alpha],
            "moment_residual": [float(r) for r in self.moment_residual],
            "lmm_residual": float(self.lmm_residual),
            "message": self.message,
            "x_values": [float(v) for v in self.x_values],
        }


def _combination(alpha, p):
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if alpha.size != p.m:
        raise ValueError(f"expected {p.m} multipliers, got {alpha.size}")
    if not np.all(np.isfinite(alpha)):
        raise ValueError("multipliers must be finite")
    return p.psi.T @ alpha


def _check_link_domain(s, p):
    ok = p.entropy.conj_interior_mask(s)
    if not np.all(ok):
        node = int(np.flatnonzero(~ok)[0])
        raise LinkDomainError(
            f"sum_k alpha_k psi_k = {s[node]!r} at node {node} "
            f"(t = {p.measure.nodes[node]!r}) is outside int(dom phi*)",
            node=node,
        )


def link_density(alpha, p):
    """Node values ``link(sum_k alpha_k psi_k(t_i))``."""
    s = _combination(alpha, p)
    _check_link_domain(s, p)
    return p.entropy.link(s)


def moment_map(alpha, p):
    """``G(alpha)``: the moments of :func:`link_density`."""
    return p.moment_matrix @ link_density(alpha, p)


def jacobian(alpha, p):
    """``J[k, l] = sum_i w_i link'(s_i) psi_k(t_i) psi_l(t_i)``."""
    s = _combination(alpha, p)
    _check_link_domain(s, p)
    d = p.measure.weights * p.entropy.dlink(s)
    jac = (p.psi * d) @ p.psi.T
    return 0.5 * (jac + jac.T)


def _weighted_lstsq(p, y):
    sw = np.sqrt(p.measure.weights)
    coef, *_ = np.linalg.lstsq((p.psi * sw).T, y * sw, rcond=None)
    return coef


def _heuristic_density(p):
    f = p.entropy
    if is_gaussian_configuration(p):
        if classify_gaussian_feasibility(p.targets).kind == FEASIBLE_INTERIOR:
            return gaussian_solution(p.targets).density(p.measure.nodes)
    c = None
    w = p.measure.weights
    for row, target in zip(p.psi, p.targets):
        mass = float(np.sum(w * row))
        if np.all(row > 0) and mass > 0:
            c = target / mass
            break
    if c is None or not f.interior_mask(c):
        c = f.interior_point()
    return np.full(p.measure.n, c)


def _shifted_start(p):
    """Multipliers putting every node at or beyond an interior conjugate point,
    using a basis function of constant sign."""
    point = p.entropy.conj_interior_point()
    for j, row in enumerate(p.psi):
        if np.all(row > 0):
            # row / row.min() >= 1, so s moves from `point` away from the
            # finite conjugate bound
            alpha = np.zeros(p.m)
            alpha[j] = point / row.min()
            if np.all(p.entropy.conj_interior_mask(p.psi.T @ alpha)):
                return alpha
    return None


def init_multipliers(p, strategy=LSQ):
    """Starting multipliers.

    ``"zeros"`` returns the zero vector when ``0`` lies in the conjugate's
    domain and otherwise escalates to a start shifted along a positive basis
    function. ``"lsq"`` fits ``sum_k alpha_k psi_k`` to ``phi'`` of a
    heuristic positive density in the weighted least-squares sense.
    """
    if strategy == ZEROS:
        alpha = np.zeros(p.m)
        if np.all(p.entropy.conj_interior_mask(np.zeros(p.measure.n))):
            return alpha
    elif strategy == LSQ:
        h = _heuristic_density(p)
        alpha = _weighted_lstsq(p, p.entropy.dphi(h))
        s = p.psi.T @ alpha
        if np.all(np.isfinite(alpha)) and np.all(p.entropy.conj_interior_mask(s)):
            return alpha
    else:
        raise ValueError(f"unknown init strategy {strategy!r}")
    alpha = _shifted_start(p)
    if alpha is None:
        raise InitFailure(
            f"no interior starting multipliers for {p.entropy.name} with strategy {strategy!r}"
        )
    log.debug("init %s escalated to shifted start %s", strategy, alpha)
    return alpha


def _origin_shortcut(p):
    """True when the targets are all zero and the only feasible density with
    finite entropy is ``x = 0``."""
    f = p.entropy
    if not (f.nonnegative and f.lo_closed) or np.any(p.targets != 0.0):
        return False
    return any(np.all(row > 0) for row in p.psi)


def _newton_direction(jac, rhs):
    m = jac.shape[0]
    shift = 0.0
    for _ in range(8):
        try:
            cf = scipy.linalg.cho_factor(jac + shift * np.eye(m))
            return scipy.linalg.cho_solve(cf, rhs)
        except np.linalg.LinAlgError:
            shift = max(10.0 * shift, 1e-14 * np.trace(jac) / m)
    return np.linalg.lstsq(jac, rhs, rcond=None)[0]


def _evaluate(alpha, p):
    """Density and residual at ``alpha``; ``None`` when the link leaves its
    domain or overflows."""
    s = p.psi.T @ alpha
    if not np.all(p.entropy.conj_interior_mask(s)):
        return None
    x = p.entropy.link(s)
    if not np.all(np.isfinite(x)) or np.any(x >= MAX_FLOAT):
        return None
    return x, p.moment_matrix @ x - p.targets


def _report(p, alpha, x, r, iterations, converged, history, message):
    try:
        lmm = lmm_residual(x, alpha, p)
    except DomainError:
        # link underflowed to the boundary of dom phi at some node
        lmm = float("inf")
    return SolveReport(
        x_values=x,
        alpha=alpha,
        entropy=entropy_value(p.entropy, x, p.measure),
        moment_residual=r,
        lmm_residual=lmm,
        iterations=iterations,
        converged=converged,
        residual_history=history,
        message=message,
    )


def solve(p, opts=None):
    """Find multipliers whose link density matches the target moments.

    Newton steps ``J d = b - G(alpha)`` are damped by halving until the new
    combination stays inside the conjugate's domain and the Armijo test on
    ``0.5 * ||G(alpha) - b||**2`` passes.

    Raises
    ------
    InfeasibleTargets
        Gaussian real-line configuration with targets outside the region.
    NotConverged
        Iterations exhausted or the line search collapsed; ``.report`` holds
        the best iterate.
    """
    opts = opts or SolverOptions()
    if is_gaussian_configuration(p):
        verdict = classify_gaussian_feasibility(p.targets)
        if verdict.kind == ORIGIN:
            return _origin_report(p, "zero targets: x = 0 is the only feasible density")
        if verdict.kind != FEASIBLE_INTERIOR:
            raise InfeasibleTargets(
                f"targets {tuple(p.targets)} are infeasible ({verdict.kind})", verdict
            )
    if _origin_shortcut(p):
        return _origin_report(p, "zero targets: x = 0 is the only feasible density")

    alpha = init_multipliers(p, opts.init)
    state = _evaluate(alpha, p)
    if state is None:
        raise InitFailure("starting multipliers overflow the link")
    x, r = state
    merit = 0.5 * float(r @ r)
    history = [float(np.max(np.abs(r)))]

    for it in range(opts.max_iter + 1):
        if history[-1] <= opts.tol_moments:
            return _report(p, alpha, x, r, it, True, history, "converged")
        if it == opts.max_iter:
            break
        d = _newton_direction(jacobian(alpha, p), -r)
        t = 1.0
        for _ in range(opts.max_halvings + 1):
            trial = _evaluate(alpha + t * d, p)
            if trial is not None:
                r_new = trial[1]
                merit_new = 0.5 * float(r_new @ r_new)
                if merit_new <= (1.0 - 2.0 * opts.armijo * t) * merit:
                    break
            t *= 0.5
        else:
            report = _report(p, alpha, x, r, it, False, history, "step collapse")
            raise NotConverged(
                f"line search failed after {opts.max_halvings} halvings at iteration {it} "
                f"(|alpha| = {np.linalg.norm(alpha):.3e}, residual {history[-1]:.3e})",
                report,
            )
        alpha = alpha + t * d
        x, r = trial
        merit = merit_new
        history.append(float(np.max(np.abs(r))))
        log.debug("iter %d step %.3g residual %.3e", it + 1, t, history[-1])

    report = _report(p, alpha, x, r, opts.max_iter, False, history, "iterations exhausted")
    raise NotConverged(
        f"no convergence in {opts.max_iter} iterations (residual {history[-1]:.3e}, "
        f"|alpha| = {np.linalg.norm(alpha):.3e})",
        report,
    )


def _origin_report(p, message):
    x = np.zeros(p.measure.n)
    r = p.moment_matrix @ x - p.targets
    return SolveReport(
        x_values=x,
        alpha=None,
        entropy=entropy_value(p.entropy, x, p.measure),
        moment_residual=r,
        lmm_residual=float("inf"),
        iterations=0,
        converged=True,
        residual_history=[0.0],
        message=message,
    )
