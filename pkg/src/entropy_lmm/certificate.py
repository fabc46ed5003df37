"""Optimality certificates for candidate densities.

Two independent routes are offered for a feasible candidate ``xbar``:

* multipliers: if ``phi'(xbar(t)) = sum_k alpha_k psi_k(t)`` at every node,
  ``xbar`` is optimal. When no ``alpha`` is given the best one is found by
  weighted least squares and the sup-norm defect is tested.
* directions: optimality is equivalent to
  ``int phi'(xbar) u dmu >= 0`` for every feasible direction ``u`` in the
  null space of the moment operator. Sampled directions can always refute
  optimality; they certify it only when they span the whole null space and
  ``xbar`` is interior, so that the cone is the full subspace.
"""

from dataclasses import dataclass, field
import math

import numpy as np
import scipy.linalg

from .errors import DomainError, RankDeficientBasis
from .extreal import ext_mul_array
from .measure import entropy_value, integrate
from .problem import FEASIBILITY_TOL, feasibility_residual

__all__ = [
    "CertificateOptions",
    "CertificateStatus",
    "directional_derivative",
    "lmm_residual",
    "best_multipliers",
    "sample_feasible_directions",
    "check_interiority",
    "certify",
    "CERTIFIED_OPTIMAL",
    "FEASIBLE_NOT_CERTIFIED",
    "INFEASIBLE",
]

CERTIFIED_OPTIMAL = "certified_optimal"
FEASIBLE_NOT_CERTIFIED = "feasible_not_certified"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class CertificateOptions:
    directions: int = 64
    seed: int = 0
    dd_tol: float = 1e-8
    lmm_tol: float = 1e-8
    feasibility_tol: float = FEASIBILITY_TOL


@dataclass
class CertificateStatus:
    verdict: str
    feasible: bool
    feasibility_residual: float
    lmm_residual: float
    directions_checked: int
    min_directional_derivative: float
    certified_by: str = None
    interior: bool = True
    alpha: np.ndarray = None
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "verdict": self.verdict,
            "certified_by": self.certified_by,
            "feasible": bool(self.feasible),
            "feasibility_residual": float(self.feasibility_residual),
            "lmm_residual": float(self.lmm_residual),
            "alpha": None if self.alpha is None else [float(a) for a in self.alpha],
            "directions_checked": int(self.directions_checked),
            "min_directional_derivative": float(self.min_directional_derivative),
            "interior": bool(self.interior),
            "notes": list(self.notes),
        }


def directional_derivative(xbar, x, f, measure):
    """``int phi'(xbar(t)) (x(t) - xbar(t)) dmu(t)``, possibly ``-inf``.

    Node products with a zero increment are zero even where ``phi'(xbar)`` is
    infinite.
    """
    xbar = measure.check(xbar, "xbar")
    x = measure.check(x, "x")
    if not math.isfinite(entropy_value(f, xbar, measure)):
        raise DomainError("directional derivative needs a finite entropy at xbar")
    if not np.all(f.domain_mask(x)):
        raise DomainError("x has node values outside dom phi")
    slope = f.dphi(xbar)
    return integrate(ext_mul_array(slope, x - xbar), measure)


def _slope_along(slope, u, measure):
    return integrate(ext_mul_array(slope, u), measure)


def lmm_residual(xbar, alpha, p):
    """Sup-norm defect of ``phi'(xbar) = sum_k alpha_k psi_k`` over the nodes."""
    slope = p.entropy.dphi(p.measure.check(xbar, "xbar"))
    if not np.all(np.isfinite(slope)):
        node = int(np.flatnonzero(~np.isfinite(slope))[0])
        raise DomainError(f"phi'(xbar) is infinite at node {node}")
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    return float(np.max(np.abs(slope - p.psi.T @ alpha)))


def best_multipliers(xbar, p):
    """``alpha`` minimizing ``sum_i w_i (phi'(xbar_i) - sum_k alpha_k psi_k(t_i))**2``."""
    slope = p.entropy.dphi(p.measure.check(xbar, "xbar"))
    if not np.all(np.isfinite(slope)):
        raise DomainError("best multipliers need xbar inside int(dom phi) at every node")
    sw = np.sqrt(p.measure.weights)
    alpha, _, rank, _ = np.linalg.lstsq((p.psi * sw).T, slope * sw, rcond=None)
    if rank < p.m:
        raise RankDeficientBasis(f"weighted basis matrix has rank {rank} < {p.m}")
    return alpha


def null_space_basis(p):
    """Orthonormal basis (columns) of ``{u : Psi(u) = 0}``."""
    return scipy.linalg.null_space(p.moment_matrix)


def sample_feasible_directions(p, count, seed=0):
    """Unit vectors ``u`` with ``Psi(u) = 0``.

    When ``count`` is at least the null-space dimension the orthonormal basis
    itself comes first, followed by random combinations; otherwise all
    directions are random combinations. The same seed gives the same set.
    """
    if count < 1:
        raise ValueError("need at least one direction")
    q = null_space_basis(p)
    dim = q.shape[1]
    if dim == 0:
        return []
    rng = np.random.default_rng(seed)
    out = []
    if count >= dim:
        out.extend(q[:, j].copy() for j in range(dim))
    while len(out) < count:
        u = q @ rng.standard_normal(dim)
        out.append(u / np.linalg.norm(u))
    return out


def check_interiority(xbar, f):
    """``(True, [])`` when every node value is inside ``int(dom phi)``,
    otherwise ``(False, offending_indices)``."""
    inner = f.interior_mask(np.asarray(xbar, dtype=float))
    bad = np.flatnonzero(~inner).tolist()
    return not bad, bad


def _cone_admissible(u, xbar, f):
    # x + eps * u must stay in dom phi for some eps > 0
    at_lo = xbar <= f.lo
    at_hi = xbar >= f.hi
    return not (np.any(u[at_lo] < 0.0) or np.any(u[at_hi] > 0.0))


def _trivial_cone(xbar, p):
    """True when no nonzero feasible direction keeps ``xbar`` in ``dom phi``:
    ``xbar`` sits at the lower endpoint everywhere and some basis function is
    strictly positive, so ``u >= 0`` with ``Psi(u) = 0`` forces ``u = 0``."""
    f = p.entropy
    if not np.isfinite(f.lo) or not np.all(xbar == f.lo):
        return False
    return any(np.all(row > 0) for row in p.psi)


def certify(xbar, p, alpha=None, opts=None):
    """Classify ``xbar`` as certified optimal, feasible but not certified, or
    infeasible for problem ``p``."""
    opts = opts or CertificateOptions()
    f, measure = p.entropy, p.measure
    xbar = measure.check(xbar, "candidate")
    notes = []
    residual = float(np.max(np.abs(feasibility_residual(xbar, p))))
    in_domain = bool(np.all(f.domain_mask(xbar)))
    value = entropy_value(f, xbar, measure) if in_domain else math.inf
    interior, _ = check_interiority(xbar, f)

    def status(verdict, **kw):
        kw.setdefault("lmm_residual", math.inf)
        kw.setdefault("directions_checked", 0)
        kw.setdefault("min_directional_derivative", math.nan)
        return CertificateStatus(
            verdict=verdict,
            feasible=verdict != INFEASIBLE,
            feasibility_residual=residual,
            interior=interior,
            notes=notes,
            **kw,
        )

    if not in_domain or not math.isfinite(value):
        notes.append("candidate has node values outside dom phi or infinite entropy")
        return status(INFEASIBLE)
    if residual > opts.feasibility_tol:
        notes.append(f"moment residual {residual:.3e} exceeds {opts.feasibility_tol:.1e}")
        return status(INFEASIBLE)

    lmm = math.inf
    if interior:
        if alpha is None:
            alpha = best_multipliers(xbar, p)
        lmm = lmm_residual(xbar, alpha, p)
    else:
        alpha = None
        notes.append("candidate touches the boundary of dom phi; no multiplier route")

    slope = f.dphi(xbar)
    directions = sample_feasible_directions(p, opts.directions, opts.seed)
    checked = 0
    min_dd = math.inf
    all_admissible = True
    for u in directions:
        for v in (u, -u):
            if not _cone_admissible(v, xbar, f):
                all_admissible = False
                continue
            checked += 1
            min_dd = min(min_dd, _slope_along(slope, v, measure))
    spans = len(directions) >= measure.n - p.m

    kw = dict(
        lmm_residual=lmm,
        directions_checked=checked,
        min_directional_derivative=min_dd if checked else math.nan,
        alpha=alpha,
    )
    if lmm <= opts.lmm_tol:
        return status(CERTIFIED_OPTIMAL, certified_by="multipliers", **kw)
    if _trivial_cone(xbar, p):
        notes.append("no nonzero feasible direction stays in dom phi")
        return status(CERTIFIED_OPTIMAL, certified_by="trivial_cone", **kw)
    if interior and spans and all_admissible and checked and min_dd >= -opts.dd_tol:
        return status(CERTIFIED_OPTIMAL, certified_by="directions", **kw)
    return status(FEASIBLE_NOT_CERTIFIED, **kw)
