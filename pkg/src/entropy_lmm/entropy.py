"""Convex entropy integrands and their conjugate link functions.

Each family is a strictly convex ``phi`` on an interval ``dom phi`` with
nonempty interior. Besides ``phi`` itself a family provides

* ``dphi``: the derivative on the interior, extended to finite endpoints by
  its one-sided limit (which may be infinite),
* ``link``: the derivative of the Fenchel conjugate, i.e. the inverse of
  ``dphi``; it maps a multiplier combination ``s`` to a density value,
* ``dlink``: the derivative of ``link``, equal to ``1 / phi''(link(s))``.

All methods are vectorized over numpy arrays and return floats for scalar
input.
"""

import math

import numpy as np
from scipy.special import expit, logit, xlogy

from .errors import DomainError

__all__ = [
    "EntropyFunction",
    "BoltzmannShannon",
    "BoltzmannShannonMinusU",
    "Burg",
    "Quadratic",
    "FermiDirac",
    "FAMILIES",
    "get_entropy",
    "phi_eval",
    "phi_prime",
    "conj_prime",
    "conj_prime_deriv",
]

INF = math.inf
MAX_FLOAT = np.finfo(float).max


def _out(values, scalar):
    return float(values) if scalar else values


def _as_array(u):
    arr = np.asarray(u, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


class EntropyFunction:
    """Base class for an admissible entropy integrand.

    Subclasses set the domain endpoints ``lo``/``hi``, whether each finite
    endpoint belongs to ``dom phi`` and the open interval ``(conj_lo,
    conj_hi)`` on which the link is defined, then implement the ``_phi``,
    ``_dphi``, ``_d2phi``, ``_link`` and ``_dlink`` kernels on interior
    points.
    """

    name = ""
    lo = -INF
    hi = INF
    lo_closed = False
    hi_closed = False
    conj_lo = -INF
    conj_hi = INF

    def __repr__(self):
        return f"{type(self).__name__}()"

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self))

    @property
    def nonnegative(self):
        """True when every density in the domain is nonnegative."""
        return self.lo == 0.0

    # -- domain predicates -------------------------------------------------
    def interior_mask(self, u):
        u = np.asarray(u, dtype=float)
        return (u > self.lo) & (u < self.hi)

    def domain_mask(self, u):
        u = np.asarray(u, dtype=float)
        mask = self.interior_mask(u)
        if self.lo_closed:
            mask |= u == self.lo
        if self.hi_closed:
            mask |= u == self.hi
        return mask

    def closure_mask(self, u):
        u = np.asarray(u, dtype=float)
        return (u >= self.lo) & (u <= self.hi) & np.isfinite(u)

    def conj_interior_mask(self, s):
        s = np.asarray(s, dtype=float)
        return (s > self.conj_lo) & (s < self.conj_hi)

    # -- endpoint data -----------------------------------------------------
    def phi_at_lo(self):
        return INF

    def phi_at_hi(self):
        return INF

    def dphi_at_lo(self):
        return -INF

    def dphi_at_hi(self):
        return INF

    # -- public evaluation -------------------------------------------------
    def phi(self, u):
        """``phi(u)``, equal to ``+inf`` outside ``dom phi``."""
        u, scalar = _as_array(u)
        out = np.full(u.shape, INF)
        inner = self.interior_mask(u)
        out[inner] = self._phi(u[inner])
        if np.isfinite(self.lo):
            out[u == self.lo] = self.phi_at_lo()
        if np.isfinite(self.hi):
            out[u == self.hi] = self.phi_at_hi()
        return _out(out[0] if scalar else out, scalar)

    def dphi(self, u):
        """Derivative on the interior, one-sided limits at finite endpoints."""
        u, scalar = _as_array(u)
        if not np.all(self.closure_mask(u)):
            bad = np.flatnonzero(~self.closure_mask(u))
            raise DomainError(
                f"{self.name}: phi' undefined at u={u[bad[0]]!r} (index {bad[0]})"
            )
        out = np.empty(u.shape)
        inner = self.interior_mask(u)
        out[inner] = self._dphi(u[inner])
        out[u == self.lo] = self.dphi_at_lo()
        out[u == self.hi] = self.dphi_at_hi()
        return _out(out[0] if scalar else out, scalar)

    def d2phi(self, u):
        u, scalar = _as_array(u)
        if not np.all(self.interior_mask(u)):
            raise DomainError(f"{self.name}: phi'' needs interior points")
        out = self._d2phi(u)
        return _out(out[0] if scalar else out, scalar)

    def _check_conj(self, s):
        ok = self.conj_interior_mask(s)
        if not np.all(ok):
            bad = int(np.flatnonzero(~ok)[0])
            raise DomainError(
                f"{self.name}: s={s[bad]!r} (index {bad}) outside int(dom phi*)"
                f" = ({self.conj_lo}, {self.conj_hi})"
            )

    def link(self, s):
        """Derivative of the conjugate: the ``u`` with ``phi'(u) = s``.

        Overflowing values are clamped to the largest finite float.
        """
        s, scalar = _as_array(s)
        self._check_conj(s)
        with np.errstate(over="ignore"):
            out = np.minimum(self._link(s), MAX_FLOAT)
        return _out(out[0] if scalar else out, scalar)

    def dlink(self, s):
        s, scalar = _as_array(s)
        self._check_conj(s)
        with np.errstate(over="ignore"):
            out = np.minimum(self._dlink(s), MAX_FLOAT)
        return _out(out[0] if scalar else out, scalar)

    def interior_point(self):
        """Some point of ``int(dom phi)``, used for heuristic starts."""
        return float(self.link(self.conj_interior_point()))

    def conj_interior_point(self):
        if np.isfinite(self.conj_lo) and np.isfinite(self.conj_hi):
            return 0.5 * (self.conj_lo + self.conj_hi)
        if np.isfinite(self.conj_hi):
            return self.conj_hi - 1.0
        if np.isfinite(self.conj_lo):
            return self.conj_lo + 1.0
        return 0.0


class BoltzmannShannon(EntropyFunction):
    """``u ln u`` on ``[0, inf)`` with ``0 ln 0 = 0``."""

    name = "boltzmann_shannon"
    lo = 0.0
    lo_closed = True

    def phi_at_lo(self):
        return 0.0

    def _phi(self, u):
        return xlogy(u, u)

    def _dphi(self, u):
        return 1.0 + np.log(u)

    def _d2phi(self, u):
        return 1.0 / u

    def _link(self, s):
        return np.exp(s - 1.0)

    def _dlink(self, s):
        return np.exp(s - 1.0)


class BoltzmannShannonMinusU(EntropyFunction):
    """``u ln u - u`` on ``[0, inf)``."""

    name = "boltzmann_shannon_minus_u"
    lo = 0.0
    lo_closed = True

    def phi_at_lo(self):
        return 0.0

    def _phi(self, u):
        return xlogy(u, u) - u

    def _dphi(self, u):
        return np.log(u)

    def _d2phi(self, u):
        return 1.0 / u

    def _link(self, s):
        return np.exp(s)

    def _dlink(self, s):
        return np.exp(s)


class Burg(EntropyFunction):
    """``-ln u`` on ``(0, inf)``; the conjugate lives on ``s < 0``."""

    name = "burg"
    lo = 0.0
    conj_hi = 0.0

    def _phi(self, u):
        return -np.log(u)

    def _dphi(self, u):
        return -1.0 / u

    def _d2phi(self, u):
        return 1.0 / (u * u)

    def _link(self, s):
        return -1.0 / s

    def _dlink(self, s):
        return 1.0 / (s * s)


class Quadratic(EntropyFunction):
    """``u**2 / 2`` on the whole line; the link is the identity."""

    name = "quadratic"

    def _phi(self, u):
        return 0.5 * u * u

    def _dphi(self, u):
        return u.copy()

    def _d2phi(self, u):
        return np.ones_like(u)

    def _link(self, s):
        return s.copy()

    def _dlink(self, s):
        return np.ones_like(s)


class FermiDirac(EntropyFunction):
    """``u ln u + (1-u) ln(1-u)`` on ``[0, 1]``."""

    name = "fermi_dirac"
    lo = 0.0
    hi = 1.0
    lo_closed = True
    hi_closed = True

    def phi_at_lo(self):
        return 0.0

    def phi_at_hi(self):
        return 0.0

    def _phi(self, u):
        return xlogy(u, u) + xlogy(1.0 - u, 1.0 - u)

    def _dphi(self, u):
        return logit(u)

    def _d2phi(self, u):
        return 1.0 / (u * (1.0 - u))

    def _link(self, s):
        return expit(s)

    def _dlink(self, s):
        p = expit(s)
        return p * (1.0 - p)


FAMILIES = {
    cls.name: cls()
    for cls in (BoltzmannShannon, BoltzmannShannonMinusU, Burg, Quadratic, FermiDirac)
}


def get_entropy(name):
    """Look up an entropy family by its spec-file name."""
    if isinstance(name, EntropyFunction):
        return name
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(
            f"unknown entropy family {name!r}; expected one of {sorted(FAMILIES)}"
        ) from None


def phi_eval(f, u):
    return get_entropy(f).phi(u)


def phi_prime(f, u):
    return get_entropy(f).dphi(u)


def conj_prime(f, s):
    return get_entropy(f).link(s)


def conj_prime_deriv(f, s):
    return get_entropy(f).dlink(s)
