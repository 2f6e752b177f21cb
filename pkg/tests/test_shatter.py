"""Shattering constructions and certificates."""

import numpy as np
import pytest

from heavinet import ResourceLimitError, evaluate_batch, validate
from heavinet.analysis import shatter_verify, vc_upper_bound
from heavinet.builders import shatter_budgets, shatter_points, shattering_net


def test_point_sets():
    pts = shatter_points("skip", 1, 1)
    assert np.array_equal(pts, np.arange(1, 9) / 8 - 1 / 16)
    assert np.array_equal(shatter_points("lin", 1, 0, 1), pts)
    assert np.array_equal(shatter_points("skip", 0, 0), [0.5])


def test_all_zero_and_indicator_labelings():
    net, pts = shattering_net("skip", 1, 1, 0, np.zeros(8, dtype=int))
    assert np.all(evaluate_batch(net.net, pts[:, None])[:, 0] < 0)
    lam = np.zeros(8, dtype=int)
    lam[2] = 1
    net, pts = shattering_net("skip", 1, 1, 0, lam)
    got = (evaluate_batch(net.net, pts[:, None])[:, 0] >= 0).astype(int)
    assert np.array_equal(got, lam)


def test_lin_alternating_labeling():
    lam = np.arange(8) % 2
    net, pts = shattering_net("lin", 1, 0, 1, lam)
    assert validate(net.net) == []
    got = (evaluate_batch(net.net, pts[:, None])[:, 0] >= 0).astype(int)
    assert np.array_equal(got, lam)


def test_budgets_respected():
    rng = np.random.default_rng(40)
    for kind, m, n, t in [("skip", 1, 1, 0), ("skip", 2, 1, 0), ("lin", 1, 0, 1),
                          ("lin", 1, 1, 1)]:
        budget = shatter_budgets(kind, m, n, t)
        lam = rng.integers(0, 2, 2 ** (2 * m + n if kind == "skip" else m + n + 2 * t))
        net, _ = shattering_net(kind, m, n, t, lam)
        assert net.net.arch.depth <= budget["depth"]
        assert max(net.net.arch.hidden_widths) <= budget["width"]
        if kind == "lin":
            assert net.net.arch.lin_count <= budget["identity_neurons"]


def test_certificates():
    cert = shatter_verify("skip", 1, 1)
    assert cert.labelings_tried == 256 and not cert.failures
    assert cert.implied_vc_lower_bound == 8
    assert cert.exhaustive and cert.budgets_respected
    cert = shatter_verify("lin", 1, 0, 1)
    assert cert.labelings_tried == 256 and not cert.failures
    # degenerate single point
    cert = shatter_verify("skip", 0, 0)
    assert cert.labelings_tried == 2 and cert.implied_vc_lower_bound == 1


def test_certificate_document_round_trip_fields():
    import json
    cert = shatter_verify("skip", 1, 1)
    doc = json.loads(cert.to_document())
    assert doc["implied_vc_lower_bound"] == 8
    assert doc["labelings_tried"] == 256
    assert doc["points"] == [float(z) for z in cert.points]


def test_sampled_certificate_for_larger_geometry():
    # 32 points: exhaustive enumeration is out of reach, spot-check instead
    with pytest.raises(ResourceLimitError):
        shatter_verify("skip", 2, 1)
    cert = shatter_verify("skip", 2, 1, sample_labelings=60, seed=1)
    assert not cert.failures and not cert.exhaustive
    assert len(cert.points) == 32


def test_lower_bound_consistent_with_upper():
    from heavinet import Architecture, NetworkKind
    cert = shatter_verify("skip", 1, 1)
    net, _ = shattering_net("skip", 1, 1, 0, np.zeros(8, dtype=int))
    L = net.net.arch.depth
    p = max(net.net.arch.hidden_widths)
    upper = vc_upper_bound(Architecture(NetworkKind.SKIP, (1, *(p,) * L, 1), (1,) * (L - 1)))
    assert cert.implied_vc_lower_bound <= upper
