"""Finite node/weight discretizations of a measure space and integration.

A :class:`DiscretizedMeasure` replaces ``(T, A, mu)`` by nodes ``t_i`` with
strictly positive weights ``w_i``, so "almost everywhere" means "at every
node". Grid functions are plain float arrays aligned with the nodes; they may
hold ``+-inf`` inside entropy evaluation.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .entropy import get_entropy
from .errors import BadGrid, LengthMismatch
from .extreal import ext_add

__all__ = [
    "DiscretizedMeasure",
    "build_interval_grid",
    "build_real_line_grid",
    "build_counting_grid",
    "build_explicit_measure",
    "integrate",
    "entropy_value",
    "GL_PANEL_ORDER",
]

INTERVAL = "interval"
REAL_LINE = "real_line"
COUNTING = "counting"
EXPLICIT = "explicit"
KINDS = (INTERVAL, REAL_LINE, COUNTING, EXPLICIT)

GAUSS_LEGENDRE = "gauss_legendre"
TRAPEZOID = "trapezoid"
RULES = (GAUSS_LEGENDRE, TRAPEZOID)

GL_PANEL_ORDER = 8


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscretizedMeasure:
    """Nodes and positive weights standing in for ``(T, A, mu)``.

    Attributes
    ----------
    kind : str
        One of ``"interval"``, ``"real_line"``, ``"counting"``, ``"explicit"``.
    nodes, weights : ndarray
        Strictly increasing nodes and strictly positive weights.
    rule : str or None
        Quadrature rule for interval-type grids.
    lo, hi : float or None
        Integration bounds for interval-type grids; ``radius`` is set for
        truncated real-line grids.
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    rule: str = None
    lo: float = None
    hi: float = None
    radius: float = None

    def __post_init__(self):
        nodes, weights = _frozen(self.nodes), _frozen(self.weights)
        if self.kind not in KINDS:
            raise BadGrid(f"unknown measure kind {self.kind!r}")
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise BadGrid("nodes and weights must be 1-d arrays of equal length")
        if nodes.size == 0:
            raise BadGrid("a measure needs at least one node")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise BadGrid("nodes and weights must be finite")
        if np.any(weights <= 0.0):
            raise BadGrid("weights must be strictly positive")
        if np.any(np.diff(nodes) <= 0.0):
            raise BadGrid("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self):
        return self.nodes.size

    def __len__(self):
        return self.nodes.size

    def total_mass(self):
        return float(self.weights.sum())

    def check(self, values, what="grid function"):
        """Return ``values`` as a float array, raising on length mismatch."""
        values = np.asarray(values, dtype=float)
        if values.shape != self.nodes.shape:
            raise LengthMismatch(
                f"{what} has shape {values.shape}, measure has {self.n} nodes"
            )
        return values

    def describe(self):
        """JSON-ready summary (without the node arrays)."""
        out = {"kind": self.kind, "n": self.n}
        if self.rule is not None:
            out["rule"] = self.rule
        if self.kind == REAL_LINE:
            out["radius"] = self.radius
        elif self.kind == INTERVAL:
            out["lo"], out["hi"] = self.lo, self.hi
        return out


def _panel_sizes(n, order):
    panels = math.ceil(n / order)
    base, extra = divmod(n, panels)
    return [base + 1] * extra + [base] * (panels - extra)


def _composite_gauss_legendre(lo, hi, n):
    sizes = _panel_sizes(n, GL_PANEL_ORDER)
    edges = np.linspace(lo, hi, len(sizes) + 1)
    nodes, weights = [], []
    for q, a, b in zip(sizes, edges[:-1], edges[1:]):
        x, w = leggauss(q)
        half = 0.5 * (b - a)
        nodes.append(0.5 * (a + b) + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _trapezoid(lo, hi, n):
    nodes = np.linspace(lo, hi, n)
    h = (hi - lo) / (n - 1)
    weights = np.full(n, h)
    weights[0] = weights[-1] = 0.5 * h
    return nodes, weights


def build_interval_grid(lo, hi, n, rule=GAUSS_LEGENDRE, *, kind=INTERVAL, radius=None):
    """Discretize Lebesgue measure on ``[lo, hi]`` with ``n`` nodes.

    ``gauss_legendre`` splits the interval into ``ceil(n / 8)`` equal panels
    carrying as equal a share of the ``n`` Gauss-Legendre nodes as possible
    (8 per panel when ``n`` is a multiple of 8). ``trapezoid`` uses ``n``
    equispaced nodes.
    """
    if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
        raise BadGrid(f"need finite lo < hi, got [{lo}, {hi}]")
    if int(n) != n or n < 2:
        raise BadGrid(f"need an integer n >= 2, got {n!r}")
    n = int(n)
    if rule == GAUSS_LEGENDRE:
        nodes, weights = _composite_gauss_legendre(lo, hi, n)
    elif rule == TRAPEZOID:
        nodes, weights = _trapezoid(lo, hi, n)
    else:
        raise BadGrid(f"unknown quadrature rule {rule!r}")
    return DiscretizedMeasure(
        kind, nodes, weights, rule=rule, lo=float(lo), hi=float(hi), radius=radius
    )


def build_real_line_grid(radius=10.0, n=400, rule=GAUSS_LEGENDRE):
    """Truncate Lebesgue measure on the real line to ``[-radius, radius]``."""
    if not (np.isfinite(radius) and radius > 0):
        raise BadGrid(f"radius must be a positive finite number, got {radius!r}")
    return build_interval_grid(
        -radius, radius, n, rule, kind=REAL_LINE, radius=float(radius)
    )


def build_counting_grid(n):
    """Counting measure on ``{1, ..., n}``: every weight is exactly 1."""
    if int(n) != n or n < 1:
        raise BadGrid(f"need an integer N >= 1, got {n!r}")
    nodes = np.arange(1, int(n) + 1, dtype=float)
    return DiscretizedMeasure(COUNTING, nodes, np.ones_like(nodes))


def build_explicit_measure(nodes, weights):
    return DiscretizedMeasure(EXPLICIT, nodes, weights)


def integrate(values, measure):
    """Extended-real integral of a grid function.

    The positive and negative parts are summed separately, each in
    ``[0, inf]``, and combined with :func:`ext_add` so that ``inf - inf``
    resolves to ``+inf``.
    """
    f = measure.check(values)
    if np.any(np.isnan(f)):
        raise ValueError("grid function contains NaN")
    w = measure.weights
    # weights are > 0, so w * inf never produces the 0 * inf case
    pos = float(np.sum(w * np.maximum(f, 0.0)))
    neg = float(np.sum(w * np.maximum(-f, 0.0)))
    return ext_add(pos, -neg)


def entropy_value(f, x, measure):
    """Entropy functional ``sum_i w_i phi(x_i)``; ``+inf`` off ``dom phi``."""
    x = measure.check(x, "density")
    return integrate(get_entropy(f).phi(x), measure)
