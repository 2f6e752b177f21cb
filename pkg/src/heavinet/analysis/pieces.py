"""Piece structure of a network restricted to a segment.

``exact_pieces`` propagates an interval partition of the segment parameter
t through the layers: within a piece every pre-activation is affine in t,
each step neuron contributes at most one crossing (the root of an affine
function, solved exactly), and identity neurons carry affine coefficient
pairs.  Piece values are read from direct evaluation at representative
midpoints, and the propagated activation pattern must match the evaluation
trace there exactly.  Adjacent pieces carrying the same output merge, and
each surviving breakpoint gets a side flag from evaluation at the
breakpoint itself: +1 if it matches the right piece, -1 the left.  When
several neurons cross at one parameter with conflicting inclusion sides,
the breakpoint's own value can match neither neighbor; such single-point
pieces are kept in ``point_values`` (the two-dimensional sign-flip pattern
produces one where the segment crosses the origin).

``sampled_pieces`` is the independent cross-check: the value sequence on
the grid ``t = k/N`` (N intervals, N+1 points), change counting, and
bisection refinement of every detected change.  The grid values come from
a run-compressed forward pass — runs of grid indices with constant
activations — which reproduces, run for run, what plain grid evaluation
gives; ``_grid_values_dense`` is the literal dense evaluator the tests
compare against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..networks import Network, NetworkKind, evaluate_batch, validate

__all__ = ["SegmentPartition", "exact_pieces", "sampled_pieces"]

MERGE_TOL = 1e-12


@dataclass
class SegmentPartition:
    """Breakpoints, side flags, and values of one segment restriction.

    ``side_flags[i] = +1``: breakpoint i belongs to the piece on its right;
    ``-1``: to the left; ``0``: the breakpoint is its own single-point piece
    with value ``point_values[breakpoints[i]]``.  ``values`` has one row per
    interval piece (single-point pieces excluded)."""

    x1: np.ndarray
    x2: np.ndarray
    breakpoints: np.ndarray
    side_flags: np.ndarray
    values: np.ndarray
    point_values: dict[float, np.ndarray] = field(default_factory=dict)

    @property
    def piece_count(self) -> int:
        return len(self.values) + len(self.point_values)

    def to_document(self) -> str:
        import json
        return json.dumps({
            "segment": {"x1": [float(v) for v in self.x1],
                        "x2": [float(v) for v in self.x2]},
            "piece_count": self.piece_count,
            "breakpoints": [float(t) for t in self.breakpoints],
            "side_flags": [int(s) for s in self.side_flags],
            "values": [[float(v) for v in row] for row in self.values],
            "point_values": {repr(float(t)): [float(v) for v in row]
                             for t, row in sorted(self.point_values.items())},
        }, indent=1)

    def value_at(self, t: float) -> np.ndarray:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise InvalidInputError(f"t={t} outside [0, 1]")
        if t in self.point_values:
            return self.point_values[t]
        hits = np.nonzero(self.breakpoints == t)[0]
        if hits.size:
            i = int(hits[0])
            return self.values[i + 1] if self.side_flags[i] > 0 else self.values[i]
        idx = int(np.searchsorted(self.breakpoints, t))
        return self.values[idx]


def _layer_affine(net: Network, i: int, B: np.ndarray, U, Vl,
                  x1: np.ndarray, dx: np.ndarray, P: int):
    """Intercepts and slopes of layer i's pre-activations on each piece."""
    layer = net.layers[i]
    W = layer.W
    if i == 0:
        a = np.asarray(W @ x1) - np.asarray(layer.b)
        s = np.asarray(W @ dx)
        return np.repeat(a[:, None], P, axis=1), np.repeat(s[:, None], P, axis=1)
    if net.arch.kind is NetworkKind.LIN and U is not None:
        H = np.concatenate([B, U], axis=0)
        A = np.asarray(W @ H) - np.asarray(layer.b)[:, None]
        S = np.asarray(W[:, B.shape[0]:] @ Vl)
    else:
        A = np.asarray(W @ B) - np.asarray(layer.b)[:, None]
        S = np.zeros_like(A)
    if layer.V is not None:
        A = A + np.asarray(layer.V @ x1)[:, None]
        S = S + np.asarray(layer.V @ dx)[:, None]
    return A, S


def _split_step_lin(net: Network, i: int, A: np.ndarray, S: np.ndarray):
    """Slice pre-activation rows into the step block and the identity block."""
    if net.arch.kind is NetworkKind.LIN and i < net.arch.depth - 1:
        p = net.arch.widths[i + 1]
        return A[:p], S[:p], A[p:], S[p:]
    return A, S, None, None


def _propagate(net: Network, x1: np.ndarray, x2: np.ndarray):
    """Exact cuts of [0, 1] and the last hidden layer's bits per interior."""
    L = net.arch.depth
    dx = x2 - x1
    cuts = np.array([0.0, 1.0])
    B = np.zeros((0, 1))
    U = Vl = None
    for i in range(L):
        P = len(cuts) - 1
        A, S = _layer_affine(net, i, B, U, Vl, x1, dx, P)
        A_step, S_step, A_lin, S_lin = _split_step_lin(net, i, A, S)
        lo = cuts[:-1][None, :]
        hi = cuts[1:][None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            roots = np.where(S_step != 0.0, -A_step / S_step, np.nan)
        inside = (S_step != 0.0) & (roots > lo + MERGE_TOL) & (roots < hi - MERGE_TOL)
        new_roots = roots[inside]
        if new_roots.size:
            merged = np.sort(np.concatenate([cuts, new_roots]))
            keep = np.concatenate([[True], np.diff(merged) > MERGE_TOL])
            cuts_new = merged[keep]
            cuts_new[0], cuts_new[-1] = 0.0, 1.0
        else:
            cuts_new = cuts
        mids = 0.5 * (cuts_new[:-1] + cuts_new[1:])
        parent = np.clip(np.searchsorted(cuts, mids, side="right") - 1, 0, P - 1)
        B = np.ascontiguousarray(
            np.where(A_step[:, parent] + S_step[:, parent] * mids[None, :] >= 0.0, 1.0, 0.0))
        if A_lin is not None:
            U, Vl = A_lin[:, parent].copy(), S_lin[:, parent].copy()
        else:
            U = Vl = None
        cuts = cuts_new
    return cuts, B


def _eval_at(net: Network, x1, x2, ts: np.ndarray, with_trace: bool = False):
    pts = (1 - ts)[:, None] * x1[None, :] + ts[:, None] * x2[None, :]
    return evaluate_batch(net, pts, with_trace=with_trace)


def _same_value(pat: np.ndarray, out: np.ndarray, i: int, j: int) -> bool:
    """Whether two evaluated parameters carry the same output.

    Columns with equal last-hidden-layer activation patterns are equal by
    construction (the output is one affine map of that pattern), whatever
    the low bits of the evaluated floats say — BLAS kernels may round the
    same dot product differently between columns.  Different patterns
    compare by exact output equality, which catches genuine cancellations
    (they are exact in the dyadic constructions this package emits).
    """
    return np.array_equal(pat[:, i], pat[:, j]) or np.array_equal(out[i], out[j])


def exact_pieces(net: Network, x1, x2) -> SegmentPartition:
    """Exact partition of the segment restriction t -> f((1-t) x1 + t x2)."""
    violations = validate(net)
    if violations:
        raise InvalidInputError(f"exact_pieces: invalid network: {violations[0]}")
    x1 = np.asarray(x1, dtype=float).reshape(-1)
    x2 = np.asarray(x2, dtype=float).reshape(-1)
    if x1.shape != x2.shape or x1.shape[0] != net.arch.input_dim:
        raise InvalidInputError("segment endpoints must match the input dimension")

    if np.array_equal(x1, x2):
        v = evaluate_batch(net, x1[None, :])[0]
        return SegmentPartition(x1, x2, np.array([]), np.array([], dtype=int), v[None, :])

    cuts, bits = _propagate(net, x1, x2)
    # one traced evaluation covers the midpoints, the cut parameters, and
    # the endpoints; sameness of two parameters is judged by _same_value
    # on that call's columns
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    P, C = len(mids), len(cuts) - 2
    ts_all = np.concatenate([mids, cuts[1:-1], [0.0, 1.0]])
    pts = (1 - ts_all)[:, None] * x1[None, :] + ts_all[:, None] * x2[None, :]
    out, trace = evaluate_batch(net, pts, with_trace=True)
    pat = trace[-1]
    if not np.array_equal(bits, pat[:, :P]):
        bad = int(np.nonzero(np.any(bits != pat[:, :P], axis=0))[0][0])
        raise AssertionError(
            f"piece propagation disagrees with direct evaluation at t={mids[bad]}")

    def same(i: int, j: int) -> bool:
        return _same_value(pat, out, i, j)

    # merge adjacent interiors that carry the same output
    keep = [True] + [not same(i - 1, i) for i in range(1, P)]
    piece_cols = [i for i, k in enumerate(keep) if k]
    values = out[piece_cols]
    bps = [float(cuts[1:-1][i - 1]) for i in range(1, P) if keep[i]]
    bp_cols = [P + (i - 1) for i in range(1, P) if keep[i]]
    inner = [(float(cuts[1:-1][i - 1]), P + (i - 1)) for i in range(1, P) if not keep[i]]

    flags: list[int] = []
    point_values: dict[float, np.ndarray] = {}
    for i, (t, col) in enumerate(zip(bps, bp_cols)):
        if same(col, piece_cols[i + 1]):
            flags.append(1)
        elif same(col, piece_cols[i]):
            flags.append(-1)
        else:
            flags.append(0)
            point_values[t] = out[col]

    # crossings swallowed by merging can still hide a single-point piece
    # (opposite inclusion sides meeting at one parameter)
    inserts = []
    for t, col in inner:
        piece = int(np.searchsorted(np.array(bps), t)) if bps else 0
        if not same(col, piece_cols[piece]):
            inserts.append((t, out[col]))
    for t, v in sorted(inserts, key=lambda iv: iv[0]):
        idx = int(np.searchsorted(np.array(bps), t)) if bps else 0
        bps.insert(idx, t)
        flags.insert(idx, 0)
        values = np.insert(values, idx + 1, values[idx], axis=0)
        point_values[t] = v

    # endpoint values differing from the adjoining interior (a crossing at
    # exactly t=0 or 1) are single-point pieces without a breakpoint entry;
    # value_at checks point_values first
    if not same(P + C, piece_cols[0]):
        point_values[0.0] = out[P + C]
    if not same(P + C + 1, piece_cols[-1]):
        point_values[1.0] = out[P + C + 1]

    return SegmentPartition(x1, x2, np.array(bps), np.array(flags, dtype=int),
                            values, point_values)


def _grid_values_dense(net: Network, x1, x2, N: int) -> np.ndarray:
    """Literal grid evaluation on t = k/N, k = 0..N (test reference)."""
    t = np.arange(N + 1) / N
    X = (1 - t)[:, None] * np.asarray(x1, float)[None, :] \
        + t[:, None] * np.asarray(x2, float)[None, :]
    return evaluate_batch(net, X)


def _flip_indices(A: np.ndarray, S: np.ndarray, N: int, lo: np.ndarray, hi: np.ndarray):
    """Index in (lo, hi] where the affine sign pattern changes, or hi+1.

    ``k`` is the first grid index whose step state differs from the state at
    ``lo``; correction rounds pin it exactly against the float evaluation of
    ``A + S * (k/N)``, and a final validation drops crossings whose state
    never actually changes inside the run.
    """
    up = S > 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        root = np.clip(-A / S, -1.0, 2.0)
    k = np.where(up, np.ceil(root * N), np.floor(root * N) + 1).astype(np.int64)
    k = np.clip(k, lo + 1, hi + 1)
    for _ in range(2):
        z = A + S * (np.minimum(k - 1, hi) / N)
        flipped_before = np.where(up, z >= 0.0, z < 0.0)
        k = np.where(flipped_before & (k - 1 >= lo + 1), k - 1, k)
        z = A + S * (np.minimum(k, hi + 1) / N)
        not_flipped = np.where(up, z < 0.0, z >= 0.0) & (k <= hi)
        k = np.where(not_flipped, k + 1, k)
    # validate: state really changes between k-1 and k
    z_prev = A + S * (np.minimum(k - 1, hi) / N)
    z_here = A + S * (np.minimum(k, hi + 1) / N)
    state_prev = z_prev >= 0.0
    state_here = z_here >= 0.0
    real = (k > lo) & (k <= hi) & (state_prev != state_here)
    return np.where(real, k, hi + 1)


def sampled_pieces(net: Network, x1, x2, N: int, refine_tol: float = 1e-12) -> int:
    """Piece count seen on the grid t = k/N plus bisection refinement.

    Counts value changes along the grid, then bisects every detected change
    down to ``refine_tol``, adding any further values discovered on the
    way.  The result never exceeds the exact piece count.
    """
    if N < 2:
        raise InvalidInputError("sampled_pieces needs N >= 2")
    violations = validate(net)
    if violations:
        raise InvalidInputError(f"sampled_pieces: invalid network: {violations[0]}")
    x1 = np.asarray(x1, dtype=float).reshape(-1)
    x2 = np.asarray(x2, dtype=float).reshape(-1)
    if x1.shape != x2.shape or x1.shape[0] != net.arch.input_dim:
        raise InvalidInputError("segment endpoints must match the input dimension")
    L = net.arch.depth
    dx = x2 - x1

    starts = np.array([0, N + 1], dtype=np.int64)  # run boundaries over k = 0..N
    B = np.zeros((0, 1))
    U = Vl = None
    for i in range(L):
        P = len(starts) - 1
        A, S = _layer_affine(net, i, B, U, Vl, x1, dx, P)
        A_step, S_step, A_lin, S_lin = _split_step_lin(net, i, A, S)
        lo = starts[:-1]
        hi = starts[1:] - 1
        rows, cols = np.nonzero(S_step != 0.0)
        splits = np.empty(0, dtype=np.int64)
        if rows.size:
            k = _flip_indices(A_step[rows, cols], S_step[rows, cols], N,
                              lo[cols], hi[cols])
            splits = k[k <= hi[cols]]
        starts_new = np.unique(np.concatenate([starts, splits])) if splits.size else starts
        heads = starts_new[:-1]
        parent = np.searchsorted(starts, heads, side="right") - 1
        tvals = heads / N
        B = np.ascontiguousarray(
            np.where(A_step[:, parent] + S_step[:, parent] * tvals[None, :] >= 0.0, 1.0, 0.0))
        if A_lin is not None:
            U, Vl = A_lin[:, parent].copy(), S_lin[:, parent].copy()
        else:
            U = Vl = None
        starts = starts_new
    # run values come from one traced evaluation at one grid point per run;
    # adjacent runs compare by _same_value on that call
    out, trace = _eval_at(net, x1, x2, starts[:-1] / N, with_trace=True)
    pat = trace[-1]

    gaps = []
    for ri in range(len(starts) - 2):
        if not _same_value(pat, out, ri, ri + 1):
            a = (starts[ri + 1] - 1) / N  # last grid point of run ri
            b = starts[ri + 1] / N        # first grid point of run ri+1
            gaps.append((a, b))

    # bisection refinement; each round evaluates (a, mid, b) of every active
    # gap in one traced call so the three-way comparisons are self-consistent
    changes = 0
    active = gaps
    while active:
        still = []
        for g in active:
            if g[1] - g[0] <= refine_tol:
                changes += 1
            else:
                still.append(g)
        active = still
        if not active:
            break
        ts = np.concatenate([[a, 0.5 * (a + b), b] for a, b in active])
        rout, rtrace = _eval_at(net, x1, x2, ts, with_trace=True)
        rpat = rtrace[-1]
        nxt = []
        for gi, (a, b) in enumerate(active):
            ia, im, ib = 3 * gi, 3 * gi + 1, 3 * gi + 2
            m = 0.5 * (a + b)
            if _same_value(rpat, rout, im, ia):
                nxt.append((m, b))
            elif _same_value(rpat, rout, im, ib):
                nxt.append((a, m))
            else:  # a third value inside: two distinct changes
                nxt.append((a, m))
                nxt.append((m, b))
        active = nxt
    return changes + 1
