"""Digit recursion: hand values, conventions, and the truncation sandwich."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heavinet import InvalidInputError, mixed_radix_digits
from heavinet.radix import binary_digits, binary_digits_array, radix_products


def test_hand_values():
    assert mixed_radix_digits(0.25, (10, 10)).digits == (2, 5)
    assert mixed_radix_digits(0.0, (2, 2, 2)).digits == (0, 0, 0)
    assert mixed_radix_digits(0.5, (3,)).digits == (1,)
    assert mixed_radix_digits(0.625, (2, 2, 2)).digits == (1, 0, 1)


def test_one_takes_top_digits():
    assert mixed_radix_digits(1.0, (2, 3)).digits == (1, 2)
    assert mixed_radix_digits(1.0, (7, 7)).digits == (6, 6)


def test_domain_and_radix_validation():
    with pytest.raises(InvalidInputError):
        mixed_radix_digits(-0.1, (2,))
    with pytest.raises(InvalidInputError):
        mixed_radix_digits(0.5, (1, 2))
    with pytest.raises(InvalidInputError):
        mixed_radix_digits(0.5, (2,) * 53)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0),
       st.lists(st.integers(min_value=2, max_value=10), min_size=1, max_size=8))
def test_truncation_sandwich(x, radix):
    """trunc <= x <= trunc + 1/(d_1...d_L), verified in exact arithmetic."""
    dv = mixed_radix_digits(x, radix)
    trunc = dv.truncated_fraction()
    xf = Fraction(x)
    prod = radix_products(tuple(radix))[-1]
    if x == 1.0:
        assert trunc == 1 - Fraction(1, prod)
    else:
        assert trunc <= xf <= trunc + Fraction(1, prod)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=1, max_value=40))
def test_binary_array_matches_scalar(x, nbits):
    arr = binary_digits_array(np.array([x]), nbits)[0]
    assert tuple(arr) == binary_digits(x, nbits).digits


def test_thresholds_readout():
    dv = mixed_radix_digits(0.5, (3,))
    assert dv.thresholds() == [1, 0]  # digit 1: >=1 yes, >=2 no
