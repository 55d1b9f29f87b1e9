from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from efxlab.enclosures import (
    DEFAULT_REL_WIDTH,
    integer_nth_root,
    nth_root_enclosure,
    pow_enclosure,
    sqrt_enclosure,
)


def test_integer_nth_root_exact():
    assert integer_nth_root(243, 5) == 3
    assert integer_nth_root(1024, 10) == 2
    assert integer_nth_root(26, 3) == 2  # floor


def test_perfect_power_is_exact():
    lo, hi = nth_root_enclosure(Fraction(243), 5)
    assert lo == hi == 3
    lo, hi = sqrt_enclosure(Fraction(9, 4))
    assert lo == hi == Fraction(3, 2)


def test_sqrt2_enclosure_brackets_and_is_tight():
    lo, hi = sqrt_enclosure(2)
    assert lo**2 <= 2 <= hi**2
    assert lo < hi
    assert (hi - lo) <= hi * DEFAULT_REL_WIDTH


def test_negative_exponent_inverts():
    lo, hi = pow_enclosure(8, -1, 3)
    assert lo == hi == Fraction(1, 2)
    lo, hi = pow_enclosure(27, -2, 3)
    assert lo == hi == Fraction(1, 9)


def test_irrational_pow_enclosure_direction():
    lo, hi = pow_enclosure(10, 1, 3)
    assert lo**3 <= 10 <= hi**3
    assert (hi - lo) <= hi * DEFAULT_REL_WIDTH


@given(
    st.integers(min_value=2, max_value=1000),
    st.integers(min_value=2, max_value=6),
)
def test_enclosure_always_brackets(t, q):
    lo, hi = nth_root_enclosure(Fraction(t), q)
    assert 0 < lo <= hi
    assert lo**q <= t <= hi**q
    assert (hi - lo) <= hi * DEFAULT_REL_WIDTH


def test_exponent_reduction_consistent():
    assert pow_enclosure(7, 2, 4) == pow_enclosure(7, 1, 2)
