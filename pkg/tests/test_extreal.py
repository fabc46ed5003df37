import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entropy_lmm.extreal import ext_add, ext_add_array, ext_mul, ext_mul_array, ext_neg

INF = math.inf

# (x, y) -> x + y over the sign/infinity classes {-inf, finite, +inf}
ADD_TABLE = [
    (-INF, -INF, -INF),
    (-INF, 2.0, -INF),
    (-INF, INF, INF),
    (2.0, -INF, -INF),
    (2.0, 3.0, 5.0),
    (2.0, INF, INF),
    (INF, -INF, INF),
    (INF, 2.0, INF),
    (INF, INF, INF),
]

MUL_TABLE = [
    (-INF, -INF, INF),
    (-INF, 0.0, 0.0),
    (-INF, INF, -INF),
    (0.0, -INF, 0.0),
    (0.0, 0.0, 0.0),
    (0.0, INF, 0.0),
    (INF, -INF, -INF),
    (INF, 0.0, 0.0),
    (INF, INF, INF),
]


@pytest.mark.parametrize("x, y, expected", ADD_TABLE)
def test_add_table(x, y, expected):
    assert ext_add(x, y) == expected


@pytest.mark.parametrize("x, y, expected", MUL_TABLE)
def test_mul_table(x, y, expected):
    assert ext_mul(x, y) == expected


def test_spec_examples():
    assert ext_add(INF, -INF) == INF
    assert ext_add(3.5, -1.5) == 2.0
    assert ext_add(-INF, 7) == -INF
    assert ext_mul(0, INF) == 0.0
    assert ext_mul(-2, INF) == -INF
    assert ext_mul(4, 0.25) == 1.0


def test_nan_rejected():
    with pytest.raises(ValueError):
        ext_add(math.nan, 1.0)
    with pytest.raises(ValueError):
        ext_mul(1.0, math.nan)


def test_array_versions_match_scalar():
    xs = np.array([row[0] for row in ADD_TABLE])
    ys = np.array([row[1] for row in ADD_TABLE])
    assert list(ext_add_array(xs, ys)) == [row[2] for row in ADD_TABLE]
    xs = np.array([row[0] for row in MUL_TABLE])
    ys = np.array([row[1] for row in MUL_TABLE])
    assert list(ext_mul_array(xs, ys)) == [row[2] for row in MUL_TABLE]


finite = st.floats(-1e100, 1e100, allow_nan=False)


@given(finite, finite)
def test_finite_agrees_with_float(x, y):
    assert ext_add(x, y) == x + y
    assert ext_mul(x, y) == x * y


@given(st.floats(allow_nan=False), st.floats(allow_nan=False))
def test_add_commutes(x, y):
    assert ext_add(x, y) == ext_add(y, x)
    assert ext_mul(x, y) == ext_mul(y, x)


def test_neg():
    assert ext_neg(INF) == -INF
    assert ext_neg(2.0) == -2.0
