"""Extended-real arithmetic.

Values are plain floats where ``inf``/``-inf`` stand for the two infinities.
The conventions are the ones that make every integral of a measurable
function well defined::

    inf - inf = inf + (-inf) = -inf + inf = inf
    0 * (+-inf) = (+-inf) * 0 = 0

NaN is never a valid extended real and is rejected.
"""

import math

import numpy as np

INF = math.inf


def _check(x):
    x = float(x)
    if math.isnan(x):
        raise ValueError("NaN is not an extended real")
    return x


def ext_add(x, y):
    """Sum of two extended reals; any clash of infinities resolves to ``+inf``."""
    x, y = _check(x), _check(y)
    if x == INF or y == INF:
        return INF
    return x + y


def ext_neg(x):
    return -_check(x)


def ext_mul(x, y):
    """Product of two extended reals with ``0 * (+-inf) = 0``."""
    x, y = _check(x), _check(y)
    if x == 0.0 or y == 0.0:
        return 0.0
    return x * y


def ext_add_array(x, y):
    """Elementwise :func:`ext_add` for arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(invalid="ignore"):
        out = x + y
    out[np.isnan(out) & ~np.isnan(x) & ~np.isnan(y)] = INF
    return out


def ext_mul_array(x, y):
    """Elementwise :func:`ext_mul` for arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    with np.errstate(invalid="ignore"):
        out = x * y
    out[(x == 0.0) | (y == 0.0)] = 0.0
    return out
