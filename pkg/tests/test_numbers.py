import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windtree.errors import AmbiguousComparison
from windtree.linalg import nullspace, solve
from windtree.numbers import Interval, QuadraticNumber

SQ5 = QuadraticNumber.sqrt(5)
quads = st.builds(lambda a, b, c: QuadraticNumber(a, b, c, 5),
                  st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 20))


def test_golden_identities():
    phi = (1 + SQ5) / 2
    assert phi * phi == phi + 1
    assert 1 / phi == phi - 1
    assert QuadraticNumber.sqrt(12) == 2 * QuadraticNumber.sqrt(3)


@settings(max_examples=200)
@given(x=quads, y=quads)
def test_field_ops_match_floats(x, y):
    assert float(x + y) == pytest.approx(float(x) + float(y), abs=1e-9)
    assert float(x * y) == pytest.approx(float(x) * float(y), rel=1e-9, abs=1e-9)
    assert (x < y) == (float(x) < float(y)) or abs(float(x) - float(y)) < 1e-9
    if y:
        assert (x / y) * y == x


@settings(max_examples=200)
@given(x=quads)
def test_floor_and_text(x):
    assert math.floor(x) == math.floor(float(x)) or abs(float(x) - round(float(x))) < 1e-9
    assert QuadraticNumber.from_text(x.to_text()) == x
    assert x.to_interval().contains(float(x))


def test_interval_rounding_is_outward():
    third = Interval.from_fraction(Fraction(1, 3))
    assert third.lo < third.hi
    s = third + third + third
    assert s.contains(1.0)
    with pytest.raises(AmbiguousComparison):
        _ = Interval(0, 1) < Interval(0.5, 2)
    assert Interval(0, 1) < Interval(2, 3)


def test_exact_solve_and_nullspace():
    rows = [[1, 2], [3, 4]]
    x, rank, ok = solve(rows, [5, 6])
    assert ok and rank == 2 and x == [-4, Fraction(9, 2)]
    x, rank, ok = solve([[1, 1], [2, 2]], [1, 3])
    assert not ok
    basis = nullspace([[1, 1, 0], [0, 0, 1]])
    assert len(basis) == 1 and basis[0][0] == -basis[0][1]
    x, _, ok = solve([[SQ5, 1], [1, 0]], [SQ5 + 2, 1])
    assert ok and x == [1, 2]
