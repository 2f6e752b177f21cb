"""Closed-form calculators against hand-computed values."""

import pytest

from heavinet import Architecture, InvalidInputError, NetworkKind
from heavinet.analysis import approx_lower_bound, bound_report, piece_bound, vc_upper_bound


def test_piece_bounds():
    assert piece_bound(Architecture(NetworkKind.PLAIN, (1, 3, 7, 7, 1))) == 4
    assert piece_bound(Architecture(NetworkKind.SKIP, (1, 2, 4, 4, 1), (1, 2))) == 18
    assert piece_bound(Architecture(NetworkKind.LIN, (1, 2, 3, 1), (), 2)) == 12
    assert piece_bound(Architecture(NetworkKind.SKIP, (1, 1, 1, 1), (0, 0))) == 2


def test_approx_lower_bound():
    plain = Architecture(NetworkKind.PLAIN, (1, 3, 1))
    assert approx_lower_bound((0.0, 1.0), plain) == 0.125
    skip = Architecture(NetworkKind.SKIP, (1, 1, 1, 1), (1,))
    assert approx_lower_bound((0.0, 1.0), skip) == 1 / (2 * 2 * 2)
    assert approx_lower_bound((2.0, 2.0), plain) == 0.0
    with pytest.raises(InvalidInputError):
        approx_lower_bound((1.0, 0.0), plain)


def test_vc_upper_hand_values():
    skip = Architecture(NetworkKind.SKIP, (1, 8, 8, 8, 8, 1), (1, 1, 1))
    assert vc_upper_bound(skip) == 30 * 4 * 64 * 5  # log2(32) = 5
    lin = Architecture(NetworkKind.LIN, (1, 8, 8, 8, 8, 1), (), 2)
    assert vc_upper_bound(lin) == 30 * max(16 * 8 * 2, 4 * 64) * 5
    plain = Architecture(NetworkKind.PLAIN, (1, 8, 8, 8, 8, 1))
    assert vc_upper_bound(plain) == 30 * 4 * 64 * 5  # skip formula with s = 0


def test_vc_precondition_flag():
    narrow = Architecture(NetworkKind.SKIP, (1, 1, 1, 1), (1,))
    assert vc_upper_bound(narrow) is None
    ragged = Architecture(NetworkKind.PLAIN, (1, 3, 5, 1))
    assert vc_upper_bound(ragged) is None
    rep = bound_report(narrow)
    assert rep.vc_upper_bound is None and "precondition" in rep.note


def test_bound_report_fields():
    rep = bound_report(Architecture(NetworkKind.SKIP, (1, 8, 8, 8, 8, 1), (1, 1, 1)),
                       (0.0, 1.0))
    assert rep.piece_bound == 9 * 2 * 2 * 2
    assert rep.vc_upper_bound == 38400
    assert rep.approx_lower_bound == 1 / (2 * 72)
