"""Moment-constrained entropy minimization instances.

A :class:`MomentProblem` bundles an entropy family, a discretized measure,
basis functions ``psi_k`` and targets ``b``; a density ``x`` is feasible when
``sum_i w_i x_i psi_k(t_i) = b_k`` for every ``k``. For the three Gaussian
moments on the real line (basis ``1, t, t**2``) the feasibility region and the
optimum are known in closed form; see :func:`classify_gaussian_feasibility`
and :func:`gaussian_solution`.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .entropy import BoltzmannShannon, BoltzmannShannonMinusU, get_entropy
from .errors import BadVariance, InfeasibleTargets, LengthMismatch, RankDeficientBasis
from .measure import REAL_LINE

__all__ = [
    "Basis",
    "monomial",
    "tabulated",
    "MomentProblem",
    "FeasibilityVerdict",
    "GaussianSolution",
    "moments",
    "feasibility_residual",
    "classify_gaussian_feasibility",
    "holder_bound",
    "gaussian_solution",
    "gaussian_params_from_log_coefficients",
    "mean_variance_targets",
    "is_gaussian_configuration",
    "FEASIBILITY_TOL",
    "RANK_TOL",
]

FEASIBILITY_TOL = 1e-8
RANK_TOL = 1e-10
# |b1 b3 - b2^2| at or below this many ulps of b1 b3 counts as the boundary
BOUNDARY_ULPS = 8

ORIGIN = "origin"
FEASIBLE_INTERIOR = "feasible_interior"
INFEASIBLE_BOUNDARY = "infeasible_boundary"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Basis:
    """A basis function: ``t**degree`` or explicit values per node."""

    kind: str
    degree: int = None
    values: tuple = None

    def __post_init__(self):
        if self.kind == "monomial":
            if self.degree is None or int(self.degree) != self.degree or self.degree < 0:
                raise ValueError(f"monomial degree must be an integer >= 0, got {self.degree!r}")
        elif self.kind == "tabulated":
            if self.values is None:
                raise ValueError("tabulated basis needs values")
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        else:
            raise ValueError(f"unknown basis kind {self.kind!r}")

    def evaluate(self, measure):
        if self.kind == "monomial":
            return measure.nodes ** int(self.degree)
        values = np.asarray(self.values, dtype=float)
        if values.shape != measure.nodes.shape:
            raise LengthMismatch(
                f"tabulated basis has {values.size} values, measure has {measure.n} nodes"
            )
        return values

    def to_json(self):
        if self.kind == "monomial":
            return {"kind": "monomial", "degree": int(self.degree)}
        return {"kind": "tabulated", "values": list(self.values)}


def monomial(degree):
    return Basis("monomial", degree=degree)


def tabulated(values):
    return Basis("tabulated", values=values)


@dataclass(frozen=True, eq=False)
class MomentProblem:
    """Minimize ``sum_i w_i phi(x_i)`` subject to ``Psi(x) = b``.

    The basis is evaluated once on construction; ``psi`` is the ``m x N``
    matrix of node values. Construction fails with
    :class:`RankDeficientBasis` when the basis is numerically dependent in
    the weighted inner product.
    """

    entropy: object
    measure: object
    basis: tuple
    targets: np.ndarray
    psi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entropy", get_entropy(self.entropy))
        basis = tuple(self.basis)
        if not basis:
            raise ValueError("need at least one basis function")
        object.__setattr__(self, "basis", basis)
        targets = np.array(self.targets, dtype=float).reshape(-1)
        if targets.size != len(basis):
            raise LengthMismatch(f"{targets.size} targets for {len(basis)} basis functions")
        if not np.all(np.isfinite(targets)):
            raise ValueError("targets must be finite")
        targets.setflags(write=False)
        object.__setattr__(self, "targets", targets)
        psi = np.vstack([b.evaluate(self.measure) for b in basis])
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)
        self._check_rank()

    def _check_rank(self):
        m = self.m
        if m > self.measure.n:
            raise RankDeficientBasis(f"{m} basis functions on {self.measure.n} nodes")
        sv = np.linalg.svd(self.psi * np.sqrt(self.measure.weights), compute_uv=False)
        if sv[0] == 0.0 or sv[-1] / sv[0] < RANK_TOL:
            raise RankDeficientBasis(
                f"basis is rank deficient on this grid (singular value ratio "
                f"{sv[-1] / sv[0] if sv[0] else 0.0:.3e} < {RANK_TOL})"
            )

    @property
    def m(self):
        return len(self.basis)

    @property
    def moment_matrix(self):
        """``A[k, i] = psi_k(t_i) w_i`` so that ``Psi(x) = A @ x``."""
        return self.psi * self.measure.weights

    def with_targets(self, targets):
        return MomentProblem(self.entropy, self.measure, self.basis, targets)


@dataclass(frozen=True)
class FeasibilityVerdict:
    kind: str
    witness: dict = field(default_factory=dict)

    @property
    def feasible(self):
        return self.kind in (ORIGIN, FEASIBLE_INTERIOR)

    def to_json(self):
        return {"class": self.kind, "witness": dict(self.witness)}


def moments(x, p):
    """``(Psi_1(x), ..., Psi_m(x))``."""
    x = p.measure.check(x, "density")
    return p.moment_matrix @ x


def feasibility_residual(x, p):
    return moments(x, p) - p.targets


def is_feasible(x, p, tol=FEASIBILITY_TOL):
    return float(np.max(np.abs(feasibility_residual(x, p)))) <= tol


def classify_gaussian_feasibility(b):
    """Place ``b = (b1, b2, b3)`` relative to the Gaussian feasibility region.

    The region is ``{0} u {b1 > 0, b3 > 0, |b2| < sqrt(b1 b3)}``. Targets with
    ``|b2| = sqrt(b1 b3)`` (up to a few ulps) would force the Cauchy-Schwarz
    bound to be tight, which only the zero density achieves; they get their
    own ``infeasible_boundary`` verdict.
    """
    b1, b2, b3 = (float(v) for v in b)
    if not all(math.isfinite(v) for v in (b1, b2, b3)):
        return FeasibilityVerdict(INFEASIBLE, {"reason": "non-finite target"})
    if b1 == 0.0 and b2 == 0.0 and b3 == 0.0:
        return FeasibilityVerdict(ORIGIN, {"solution": "x = 0"})
    if b1 <= 0.0 or b3 <= 0.0:
        return FeasibilityVerdict(
            INFEASIBLE, {"reason": "b1 and b3 must be > 0 for a nonzero density"}
        )
    # the region is a cone; normalizing keeps b1 * b3 clear of under/overflow
    size = max(b1, abs(b2), b3)
    n1, n2, n3 = b1 / size, b2 / size, b3 / size
    scale = n1 * n3
    gap = scale - n2 * n2
    witness = {"b1b3_minus_b2sq": gap * size * size}
    if abs(gap) <= BOUNDARY_ULPS * np.finfo(float).eps * scale:
        witness["note"] = (
            "|b2| = sqrt(b1 b3): the closed region includes this point but "
            "equality in the Cauchy-Schwarz bound forces x = 0, so b1 = 0"
        )
        return FeasibilityVerdict(INFEASIBLE_BOUNDARY, witness)
    if gap < 0.0:
        witness["reason"] = "|b2| > sqrt(b1 b3) violates the Cauchy-Schwarz bound"
        return FeasibilityVerdict(INFEASIBLE, witness)
    return FeasibilityVerdict(FEASIBLE_INTERIOR, witness)


def holder_bound(x, measure):
    """Both sides of ``int |t x| <= sqrt(int |x|) sqrt(int t^2 |x|)``."""
    x = np.abs(measure.check(x, "density"))
    t, w = measure.nodes, measure.weights
    lhs = float(np.sum(w * np.abs(t) * x))
    rhs = math.sqrt(float(np.sum(w * x))) * math.sqrt(float(np.sum(w * t * t * x)))
    return lhs, rhs


@dataclass(frozen=True)
class GaussianSolution:
    """``x(t) = exp(-alpha (t - beta)**2 / 2 + gamma)`` and its entropy."""

    alpha: float
    beta: float
    gamma: float
    entropy: float

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * self.alpha * (t - self.beta) ** 2 + self.gamma)

    def log_coefficients(self):
        """``(c0, c1, c2)`` with ``ln x(t) = c0 + c1 t + c2 t**2``."""
        a, m = self.alpha, self.beta
        return (self.gamma - 0.5 * a * m * m, a * m, -0.5 * a)


def gaussian_solution(b):
    """Closed-form optimum for the Boltzmann-Shannon entropy and moments of
    ``1, t, t**2`` over the real line.

    With ``D = b1 b3 - b2**2`` the optimal density is a scaled normal with
    precision ``alpha = b1**2 / D``, mean ``beta = b2 / b1`` and log-height
    ``gamma = ln(b1**2 / sqrt(2 pi D))``; its entropy is
    ``b1 ln(b1**2 / sqrt(2 pi e D))``.
    """
    verdict = classify_gaussian_feasibility(b)
    if verdict.kind != FEASIBLE_INTERIOR:
        raise InfeasibleTargets(
            f"no interior Gaussian solution for b = {tuple(b)} ({verdict.kind})", verdict
        )
    b1, b2, b3 = (float(v) for v in b)
    d = b1 * b3 - b2 * b2
    alpha = b1 * b1 / d
    beta = b2 / b1
    gamma = math.log(b1 * b1 / math.sqrt(2.0 * math.pi * d))
    entropy = b1 * math.log(b1 * b1 / math.sqrt(2.0 * math.pi * math.e * d))
    return GaussianSolution(alpha, beta, gamma, entropy)


def gaussian_params_from_log_coefficients(c):
    """Invert :meth:`GaussianSolution.log_coefficients`: ``(alpha, beta, gamma)``."""
    c0, c1, c2 = (float(v) for v in c)
    if c2 >= 0.0:
        raise ValueError("quadratic coefficient must be negative for an integrable density")
    alpha = -2.0 * c2
    beta = c1 / alpha
    gamma = c0 + 0.5 * alpha * beta * beta
    return alpha, beta, gamma


def mean_variance_targets(mean, sigma2):
    """Targets ``(1, m, sigma**2 + m**2)`` of a probability density."""
    if not sigma2 > 0.0:
        raise BadVariance(f"variance must be positive, got {sigma2!r}")
    return np.array([1.0, float(mean), float(sigma2) + float(mean) ** 2])


def is_gaussian_configuration(p):
    """True for the real-line problem with a ``u ln u``-type entropy and the
    monomial basis ``1, t, t**2`` (in this order)."""
    if not isinstance(p.entropy, (BoltzmannShannon, BoltzmannShannonMinusU)):
        return False
    if p.measure.kind != REAL_LINE or p.m != 3:
        return False
    return all(b.kind == "monomial" and b.degree == k for k, b in enumerate(p.basis))
