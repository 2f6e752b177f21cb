"""Network families with explicit weights: plain, skip-augmented, and
linear-neuron-augmented step-activation networks.

A network with ``L`` hidden layers is parameterized by weight matrices
``W_0..W_L`` and shift vectors ``b_0..b_L``.  The output is
``W_L f_L(x) - b_L`` where hidden activations follow the kind-specific
recursion:

* plain:  ``f_l = step(W_{l-1} f_{l-1} - b_{l-1})``
* skip:   ``f_l = step(W_{l-1} f_{l-1} + V_{l-1} x - b_{l-1})`` for
  ``l >= 2``; the matrices ``V_l`` tap the raw input and carry a per-layer
  budget of nonzero rows.
* lin:    each hidden layer except the last is augmented with ``s``
  identity-activation neurons; the step activation applies to the first
  ``p_l`` coordinates only.

The step activation fires at zero: ``step(0) = 1``.  Every builder in this
package relies on that boundary convention.

Weight matrices may be dense ``numpy`` arrays or ``scipy.sparse`` matrices;
the large emitted constructions use sparse storage, everything else is
dense.  Networks are immutable after construction by convention: no code in
this package writes to a layer array after ``validate`` has seen it, so
concurrent reads are safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInputError

__all__ = [
    "NetworkKind",
    "Architecture",
    "LayerParams",
    "Network",
    "ActivationTrace",
    "heaviside",
    "validate",
    "evaluate",
    "evaluate_batch",
    "embed",
]


class NetworkKind(enum.Enum):
    PLAIN = "plain"
    SKIP = "skip"
    LIN = "lin"


def heaviside(u: float) -> int:
    """Step activation: 1 iff ``u >= 0`` (zero maps to 1)."""
    u = float(u)
    if not math.isfinite(u):
        raise InvalidInputError(f"heaviside: non-finite argument {u!r}")
    return 1 if u >= 0.0 else 0


@dataclass(frozen=True)
class Architecture:
    """Shape of a network: kind, hidden depth, and width bookkeeping.

    ``widths`` is ``(p_0, ..., p_{L+1})`` with input and output dimensions at
    the ends.  For the lin kind, ``widths`` stores the unaugmented step-neuron
    counts; the stored matrices act on the augmented widths
    ``p_l + lin_count`` for hidden layers ``1..L-1``.
    """

    kind: NetworkKind
    widths: tuple[int, ...]
    skip_counts: tuple[int, ...] = ()
    lin_count: int = 0

    @property
    def depth(self) -> int:
        return len(self.widths) - 2

    @property
    def input_dim(self) -> int:
        return self.widths[0]

    @property
    def output_dim(self) -> int:
        return self.widths[-1]

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return self.widths[1:-1]

    def augmented_widths(self) -> tuple[int, ...]:
        """Actual vector sizes at each level (input, hidden 1..L, output)."""
        if self.kind is not NetworkKind.LIN:
            return self.widths
        ws = list(self.widths)
        for ell in range(1, self.depth):
            ws[ell] += self.lin_count
        return tuple(ws)

    def param_count(self) -> int:
        ws = self.augmented_widths()
        total = sum((ws[i] + 1) * ws[i + 1] for i in range(len(ws) - 1))
        if self.kind is NetworkKind.SKIP:
            total += self.input_dim * sum(self.skip_counts)
        return total


@dataclass
class LayerParams:
    """One affine stage: ``W h + V x - b`` (``V`` only for skip layers)."""

    W: object
    b: np.ndarray
    V: object | None = None


@dataclass
class Network:
    arch: Architecture
    layers: tuple[LayerParams, ...]


@dataclass
class ActivationTrace:
    """Hidden activations ``f_1(x) .. f_L(x)``, one vector per hidden layer."""

    hidden: list[np.ndarray]


# -- matrix payload helpers (dense ndarray or scipy.sparse) -----------------

def mat_shape(M) -> tuple[int, int]:
    return tuple(M.shape)


def mat_nonzero_rows(M) -> int:
    """Rows with at least one nonzero entry (explicit zeros do not count)."""
    if sp.issparse(M):
        csr = M.tocsr()
        counts = np.zeros(csr.shape[0], dtype=bool)
        rows = np.repeat(np.arange(csr.shape[0]), np.diff(csr.indptr))
        nz = rows[csr.data != 0]
        counts[nz] = True
        return int(counts.sum())
    return int(np.any(np.asarray(M) != 0, axis=1).sum())


def mat_all_finite(M) -> bool:
    if sp.issparse(M):
        return bool(np.all(np.isfinite(M.tocoo().data)))
    return bool(np.all(np.isfinite(M)))


def mat_to_rows(M) -> list[list[float]]:
    if sp.issparse(M):
        M = M.toarray()
    return [[float(v) for v in row] for row in np.asarray(M, dtype=float)]


# -- validation --------------------------------------------------------------

def validate(net: Network) -> list[str]:
    """Check every structural invariant; returns the list of violations.

    An empty list means the network is well formed.  Violations name the
    layer and the rule so callers can report them directly.
    """
    out: list[str] = []
    arch = net.arch
    L = arch.depth
    if L < 1:
        return [f"architecture: depth {L} < 1"]
    if any(w < 1 for w in arch.widths):
        out.append(f"architecture: widths {arch.widths} contain an entry < 1")
    if arch.kind is NetworkKind.SKIP:
        if len(arch.skip_counts) != L - 1:
            out.append(
                f"architecture: skip_counts has length {len(arch.skip_counts)}, expected L-1 = {L - 1}")
        else:
            for i, s in enumerate(arch.skip_counts):
                p = arch.widths[i + 2]
                if not 0 <= s <= p:
                    out.append(f"architecture: skip budget s_{i + 2}={s} outside [0, p_{i + 2}={p}]")
    else:
        if arch.skip_counts:
            out.append("architecture: skip_counts set on a non-skip network")
    if arch.kind is NetworkKind.LIN:
        if arch.lin_count < 0:
            out.append(f"architecture: lin_count {arch.lin_count} < 0")
    elif arch.lin_count:
        out.append("architecture: lin_count set on a non-lin network")
    if out:
        return out

    if len(net.layers) != L + 1:
        return [f"layers: {len(net.layers)} affine stages, expected L+1 = {L + 1}"]

    ws = arch.augmented_widths()
    for i, layer in enumerate(net.layers):
        want = (ws[i + 1], ws[i])
        got = mat_shape(layer.W)
        if got != want:
            out.append(f"layer {i}: W shape {got}, expected {want}")
        b = np.asarray(layer.b)
        if b.shape != (ws[i + 1],):
            out.append(f"layer {i}: b shape {b.shape}, expected ({ws[i + 1]},)")
        if layer.V is not None:
            if arch.kind is not NetworkKind.SKIP:
                out.append(f"layer {i}: V present on a {arch.kind.value} network")
            elif not 1 <= i <= L - 1:
                out.append(f"layer {i}: V present outside hidden layers 2..L")
            else:
                vshape = mat_shape(layer.V)
                if vshape != (ws[i + 1], arch.input_dim):
                    out.append(f"layer {i}: V shape {vshape}, expected ({ws[i + 1]}, {arch.input_dim})")
                else:
                    used = mat_nonzero_rows(layer.V)
                    budget = arch.skip_counts[i - 1]
                    if used > budget:
                        out.append(f"layer {i}: skip budget exceeded at layer {i + 1} "
                                   f"({used} nonzero rows of V > s_{i + 1}={budget})")
        if not mat_all_finite(layer.W) or not np.all(np.isfinite(b)) or \
                (layer.V is not None and not mat_all_finite(layer.V)):
            out.append(f"layer {i}: non-finite parameter")
    return out


# -- evaluation --------------------------------------------------------------

def _step_cols(Z: np.ndarray) -> np.ndarray:
    return np.where(Z >= 0.0, 1.0, 0.0)


def _forward(net: Network, cols: np.ndarray, want_trace: bool):
    """Forward pass on column-stacked inputs ``cols`` of shape (p0, n)."""
    arch = net.arch
    L = arch.depth
    x0 = cols
    h = cols
    trace: list[np.ndarray] | None = [] if want_trace else None
    for i in range(L):
        layer = net.layers[i]
        z = layer.W @ h
        if layer.V is not None:
            z = z + layer.V @ x0
        z = z - np.asarray(layer.b)[:, None]
        if arch.kind is NetworkKind.LIN and i < L - 1:
            p = arch.widths[i + 1]
            h = np.concatenate([_step_cols(z[:p]), z[p:]], axis=0)
        else:
            h = _step_cols(z)
        if trace is not None:
            trace.append(h)
    out_layer = net.layers[L]
    out = out_layer.W @ h - np.asarray(out_layer.b)[:, None]
    return out, trace


def evaluate(net: Network, x, with_trace: bool = False):
    """Evaluate at one point; returns the output vector (and trace if asked)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != net.arch.input_dim:
        raise InvalidInputError(
            f"evaluate: input has dimension {x.shape[0]}, network expects {net.arch.input_dim}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("evaluate: non-finite input")
    out, trace = _forward(net, x[:, None], with_trace)
    y = out[:, 0]
    if with_trace:
        return y, ActivationTrace([h[:, 0] for h in trace])
    return y


def evaluate_batch(net: Network, X, with_trace: bool = False, chunk: int | None = None):
    """Evaluate at many points, rows of ``X``; returns an (n, p_out) array.

    With ``with_trace`` the hidden activation matrices (width x n) are
    returned as well, and chunking is disabled.  Without a trace the batch is
    processed in column chunks sized to keep intermediate buffers small; the
    chunk size can shift output floats by an ulp (BLAS kernels round
    shape-dependently), never the binary activations away from thresholds.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != net.arch.input_dim:
        raise InvalidInputError(
            f"evaluate_batch: points have dimension {X.shape[1]}, network expects {net.arch.input_dim}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("evaluate_batch: non-finite input")
    cols = X.T
    n = cols.shape[1]
    if with_trace:
        out, trace = _forward(net, cols, True)
        return out.T, trace
    if chunk is None:
        widest = max(net.arch.augmented_widths())
        chunk = max(1024, int(4_000_000 / max(widest, 1)))
    if n <= chunk:
        out, _ = _forward(net, cols, False)
        return out.T
    pieces = []
    for lo in range(0, n, chunk):
        out, _ = _forward(net, cols[:, lo:lo + chunk], False)
        pieces.append(out.T)
    return np.concatenate(pieces, axis=0)


# -- kind embeddings ---------------------------------------------------------

def embed(net: Network, target_kind: NetworkKind) -> Network:
    """Re-express a network in a richer kind without changing its function.

    Supported directions: plain->skip (zero skip matrices), plain->lin
    (zero added linear neurons), skip->lin (p_0 identity-activation neurons
    carry the input across the layers), and any kind to itself.  The result
    evaluates bit-for-bit identically to the input on every point.
    """
    arch = net.arch
    if target_kind is arch.kind:
        return net
    if arch.kind is NetworkKind.PLAIN and target_kind is NetworkKind.SKIP:
        new_arch = replace(arch, kind=NetworkKind.SKIP,
                           skip_counts=tuple(0 for _ in range(arch.depth - 1)))
        layers = []
        for i, layer in enumerate(net.layers):
            if 1 <= i <= arch.depth - 1:
                V = np.zeros((np.asarray(layer.b).shape[0], arch.input_dim))
                layers.append(LayerParams(layer.W, layer.b, V))
            else:
                layers.append(LayerParams(layer.W, layer.b, None))
        return Network(new_arch, tuple(layers))
    if arch.kind is NetworkKind.PLAIN and target_kind is NetworkKind.LIN:
        new_arch = replace(arch, kind=NetworkKind.LIN, lin_count=0)
        return Network(new_arch, net.layers)
    if arch.kind is NetworkKind.SKIP and target_kind is NetworkKind.LIN:
        return _embed_skip_into_lin(net)
    raise InvalidInputError(
        f"embed: unsupported direction {arch.kind.value} -> {target_kind.value}")


def _embed_skip_into_lin(net: Network) -> Network:
    """Skip->lin embedding: carry x through p_0 identity neurons per layer."""
    arch = net.arch
    L, d = arch.depth, arch.input_dim
    new_arch = Architecture(NetworkKind.LIN, arch.widths, (), d)
    layers: list[LayerParams] = []
    for i, layer in enumerate(net.layers):
        W = layer.W.toarray() if sp.issparse(layer.W) else np.asarray(layer.W, dtype=float)
        V = None
        if layer.V is not None:
            V = layer.V.toarray() if sp.issparse(layer.V) else np.asarray(layer.V, dtype=float)
        b = np.asarray(layer.b, dtype=float)
        n_out, n_in = W.shape
        in_aug = n_in + (d if 1 <= i <= L - 1 else 0)
        out_aug = n_out + (d if 0 <= i <= L - 2 else 0)
        Wn = np.zeros((out_aug, in_aug))
        bn = np.zeros(out_aug)
        Wn[:n_out, :n_in] = W
        bn[:n_out] = b
        if V is not None:
            # skip taps now read the carried input at the end of the layer
            Wn[:n_out, n_in:n_in + d] = V
        if 0 <= i <= L - 2:
            if i == 0:
                Wn[n_out:, :d] = np.eye(d)       # pick up x itself
            else:
                Wn[n_out:, n_in:n_in + d] = np.eye(d)  # pass the carrier along
        layers.append(LayerParams(Wn, bn, None))
    return Network(new_arch, tuple(layers))
