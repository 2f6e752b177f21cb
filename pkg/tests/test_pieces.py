"""Segment partitions: worked cases, the grid cross-check, reconstruction."""

import numpy as np
import pytest

from heavinet import InvalidInputError, NetworkKind, evaluate_batch
from heavinet.analysis import exact_pieces, piece_bound, sampled_pieces
from heavinet.analysis.pieces import _grid_values_dense, _same_value
from heavinet.builders import (
    hyperrectangle_indicator,
    mixed_radix_bit_extractor,
    square_approximator,
    xor_network,
)
from netgen import random_network, random_segment


def test_square_two_pieces():
    built = square_approximator(2, 1, (0,))
    part = exact_pieces(built.net, [0.0], [1.0])
    assert part.piece_count == 2
    assert np.allclose(part.breakpoints, [0.5])
    assert part.side_flags.tolist() == [1]  # threshold owns the right piece
    assert sampled_pieces(built.net, [0.0], [1.0], 10_000) == 2


def test_rect_diagonal_three_pieces():
    built = hyperrectangle_indicator([0.2, 0.2], [0.8, 0.8])
    part = exact_pieces(built.net, [0, 0], [1, 1])
    assert part.piece_count == 3
    assert np.allclose(part.breakpoints, [0.2, 0.8])
    assert part.side_flags.tolist() == [1, -1]  # boundaries belong to the box
    assert part.values[:, 0].tolist() == [0.0, 1.0, 0.0]


def test_degenerate_segment():
    built = xor_network()
    part = exact_pieces(built.net, [0.3, 0.3], [0.3, 0.3])
    assert part.piece_count == 1


def test_xor_origin_single_point_piece():
    built = xor_network()
    part = exact_pieces(built.net, [0.1, -0.1], [-0.1, 0.1])
    assert part.piece_count == 3
    assert part.side_flags.tolist() == [0]
    assert part.point_values[0.5][0] == 0.0
    assert part.value_at(0.5)[0] == 0.0
    assert part.value_at(0.25)[0] == 1.0
    # the grid hits t = 1/2 exactly, so the sampled count agrees
    assert sampled_pieces(built.net, [0.1, -0.1], [-0.1, 0.1], 10_000) == 3


def test_sampled_constant():
    built = hyperrectangle_indicator([0.0], [1.0])
    assert sampled_pieces(built.net, [0.2], [0.8], 1000) == 1


def test_sampled_rejects_tiny_grid():
    built = xor_network()
    with pytest.raises(InvalidInputError):
        sampled_pieces(built.net, [0, 0], [1, 1], 1)


def test_extractor_achieves_bound():
    built = mixed_radix_bit_extractor((2, 2, 2))
    part = exact_pieces(built.net, [0.0], [1.0])
    assert part.piece_count == piece_bound(built.net.arch) == 8


def test_run_compression_equals_dense_grid():
    # the run-compressed pass must reproduce literal grid evaluation
    rng = np.random.default_rng(60)
    for kind in NetworkKind:
        for _ in range(30):
            net = random_network(kind, rng)
            x1, x2 = random_segment(rng, net.arch.input_dim)
            N = 997
            dense = _grid_values_dense(net, x1, x2, N)
            count = sampled_pieces(net, x1, x2, N, refine_tol=1.0 / N)
            dense_changes = int(np.sum(np.any(dense[1:] != dense[:-1], axis=1)))
            assert count == dense_changes + 1


def test_partition_reconstruction():
    # evaluating at random parameters and around every breakpoint lands on
    # the partition's pieces; structural agreement runs through one traced
    # call since BLAS may round the same dot product differently across
    # calls, and the stored values match to an ulp
    rng = np.random.default_rng(61)
    for kind in NetworkKind:
        for _ in range(40):
            net = random_network(kind, rng)
            x1, x2 = random_segment(rng, net.arch.input_dim)
            part = exact_pieces(net, x1, x2)
            ts = list(rng.uniform(0, 1, 100))
            for t in part.breakpoints:
                ts.extend([float(t), max(0.0, float(t) - 1e-12), min(1.0, float(t) + 1e-12)])
            edges = np.concatenate([[0.0], part.breakpoints, [1.0]])
            reps = [0.5 * (edges[i] + edges[i + 1]) for i in range(len(part.values))]
            all_ts = np.array(ts + reps)
            pts = (1 - all_ts)[:, None] * np.asarray(x1)[None, :] \
                + all_ts[:, None] * np.asarray(x2)[None, :]
            out, trace = evaluate_batch(net, pts, with_trace=True)
            pat = trace[-1]
            n_t = len(ts)
            on_bp = set(float(t) for t in part.breakpoints) | set(part.point_values)
            for i, t in enumerate(all_ts[:n_t]):
                expected = part.value_at(float(t))
                assert np.allclose(out[i], expected, rtol=0,
                                   atol=4e-16 * (1 + float(np.max(np.abs(expected)))))
                if float(t) not in on_bp:
                    piece = int(np.searchsorted(part.breakpoints, float(t)))
                    assert _same_value(pat, out, i, n_t + piece), f"t={t}"


def test_partition_reconstruction_exact_for_dyadic_builders():
    # builder networks evaluate in exact arithmetic, so here agreement is
    # bitwise, breakpoints and both sides included
    built = square_approximator(3, 1, (1, 0))
    part = exact_pieces(built.net, [0.0], [1.0])
    ts = np.concatenate([np.linspace(0, 1, 1001), part.breakpoints,
                         part.breakpoints - 1e-12, part.breakpoints + 1e-12])
    ts = ts[(ts >= 0) & (ts <= 1)]
    out = evaluate_batch(built.net, ts[:, None])
    for t, o in zip(ts, out):
        assert np.array_equal(o, part.value_at(float(t)))


def test_exact_pieces_soundness_randomized():
    rng = np.random.default_rng(62)
    for kind in NetworkKind:
        for _ in range(60):
            net = random_network(kind, rng)
            bound = piece_bound(net.arch)
            x1, x2 = random_segment(rng, net.arch.input_dim)
            part = exact_pieces(net, x1, x2)
            assert part.piece_count <= bound
            assert sampled_pieces(net, x1, x2, 50_000) <= part.piece_count


def test_vector_valued_outputs():
    # partitions work for multi-output networks; values compare row-wise
    from heavinet import Architecture, LayerParams, Network

    rng = np.random.default_rng(63)
    arch = Architecture(NetworkKind.PLAIN, (2, 4, 3, 2))
    ws = arch.augmented_widths()
    net = Network(arch, tuple(
        LayerParams(rng.uniform(-2, 2, (ws[i + 1], ws[i])), rng.uniform(-2, 2, ws[i + 1]))
        for i in range(3)))
    part = exact_pieces(net, [0.1, 0.9], [0.8, 0.2])
    assert part.values.shape[1] == 2
    assert part.piece_count <= piece_bound(arch)
    assert sampled_pieces(net, [0.1, 0.9], [0.8, 0.2], 100_000) == part.piece_count


def test_partition_recovers_synthesized_structure():
    # build a known piecewise-constant function, then ask the partition
    # machinery for its structure back: breakpoints, sides, values, exactly
    from heavinet.builders import PieceSpec, piecewise_constant_1d

    rng = np.random.default_rng(64)
    for _ in range(50):
        p = int(rng.integers(1, 7))
        bps = np.sort(rng.choice(np.arange(1, 2**16), size=p, replace=False)) / 2.0**16
        sides = tuple(int(s) for s in rng.choice([-1, 1], p))
        # distinct dyadic values so no neighboring pieces merge
        vals = rng.choice(np.arange(-2**12, 2**12), size=p + 1, replace=False) / 2.0**6
        spec = PieceSpec(tuple(bps), sides, tuple(vals))
        built = piecewise_constant_1d(spec)
        part = exact_pieces(built.net, [0.0], [1.0])
        assert part.piece_count == p + 1
        assert np.array_equal(part.breakpoints, bps)
        assert tuple(part.side_flags) == sides
        assert np.array_equal(part.values[:, 0], vals)
        assert part.point_values == {}
