"""Layer-by-layer assembly of explicit-weight networks.

Builders add neurons one hidden layer at a time.  A neuron is described by
its weights on previous-layer neurons (by handle), optional taps on the raw
input (skip rows), a bias, and its activation (step or identity).  ``build``
packs everything into weight matrices — dense by default, COO-assembled
sparse for the big constructions — pads identity neurons to a uniform
per-layer count for the lin kind, and returns a validated ``Network``.

Handles are opaque integers; referencing a handle outside the immediately
preceding layer is an assembly error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidInputError
from ..networks import Architecture, LayerParams, Network, NetworkKind, validate

__all__ = ["NetBuilder"]


@dataclass
class _Neuron:
    handle: int
    layer: int
    prev: dict[int, float]
    inp: dict[int, float]
    bias: float
    linear: bool
    slot: int = -1


class NetBuilder:
    def __init__(self, input_dim: int, kind: NetworkKind, sparse: bool = False):
        self.input_dim = int(input_dim)
        self.kind = kind
        self.sparse = sparse
        self.layers: list[list[_Neuron]] = []
        self._by_handle: dict[int, _Neuron] = {}
        self._out_rows: list[dict[int, float]] | None = None
        self._out_bias: list[float] | None = None
        self.probes: dict[str, int] = {}

    # -- assembly -----------------------------------------------------------

    def new_layer(self) -> int:
        self.layers.append([])
        return len(self.layers)

    def _add(self, prev: dict[int, float], inp: dict[int, float] | None,
             bias: float, linear: bool) -> int:
        if not self.layers:
            raise InvalidInputError("add a layer before adding neurons")
        layer_idx = len(self.layers) - 1
        if layer_idx == 0:
            if inp:
                raise InvalidInputError("first hidden layer reads the input through prev")
            for k in prev:
                if not 0 <= k < self.input_dim:
                    raise InvalidInputError(f"input coordinate {k} out of range")
        else:
            for h in prev:
                n = self._by_handle.get(h)
                if n is None or n.layer != layer_idx - 1:
                    raise InvalidInputError("neuron references a non-adjacent handle")
            if inp and self.kind is not NetworkKind.SKIP:
                raise InvalidInputError("input taps beyond layer 1 need the skip kind")
            for k in inp or {}:
                if not 0 <= k < self.input_dim:
                    raise InvalidInputError(f"input coordinate {k} out of range")
        if linear and self.kind is not NetworkKind.LIN:
            raise InvalidInputError("identity neurons need the lin kind")
        handle = len(self._by_handle)
        neuron = _Neuron(handle, layer_idx, dict(prev), dict(inp or {}), float(bias), linear)
        self.layers[-1].append(neuron)
        self._by_handle[handle] = neuron
        return handle

    def step(self, prev: dict[int, float], bias: float = 0.0,
             inp: dict[int, float] | None = None) -> int:
        """Step neuron: fires iff its affine pre-activation is >= 0."""
        return self._add(prev, inp, bias, linear=False)

    def linear(self, prev: dict[int, float], bias: float = 0.0) -> int:
        """Identity neuron (lin kind only)."""
        return self._add(prev, None, bias, linear=True)

    def forward(self, handle: int) -> int:
        """Carry a binary neuron one layer: b = step(b - 1/2)."""
        return self.step({handle: 1.0}, bias=-0.5)

    def tag(self, label: str, handle: int) -> int:
        self.probes[label] = handle
        return handle

    def output(self, rows: list[dict[int, float]], bias: list[float]) -> None:
        """Affine output stage: row r computes sum(w f) + bias[r]."""
        if len(rows) != len(bias):
            raise InvalidInputError("output rows and bias lengths differ")
        for row in rows:
            for h in row:
                n = self._by_handle.get(h)
                if n is None or n.layer != len(self.layers) - 1:
                    raise InvalidInputError("output references a non-last-layer handle")
        self._out_rows = [dict(r) for r in rows]
        self._out_bias = [float(v) for v in bias]

    # -- packing ------------------------------------------------------------

    def build(self) -> tuple[Network, dict[str, tuple[int, int]]]:
        if self._out_rows is None:
            raise InvalidInputError("output layer not set")
        L = len(self.layers)
        if L < 1:
            raise InvalidInputError("network needs at least one hidden layer")
        if any(not neurons for neurons in self.layers):
            raise InvalidInputError("empty hidden layer")

        step_counts, lin_counts = [], []
        for neurons in self.layers:
            n_lin = sum(n.linear for n in neurons)
            lin_counts.append(n_lin)
            step_counts.append(len(neurons) - n_lin)
            pos = 0
            for n in neurons:
                if not n.linear:
                    n.slot = pos
                    pos += 1
            for n in neurons:
                if n.linear:
                    n.slot = pos
                    pos += 1
        if any(c == 0 for c in step_counts):
            raise InvalidInputError("every hidden layer needs at least one step neuron")

        if self.kind is NetworkKind.LIN:
            if lin_counts[-1]:
                raise InvalidInputError("last hidden layer of a lin network must be pure step")
            s = max(lin_counts[:-1], default=0)
            aug = [self.input_dim] + [p + (s if ell < L - 1 else 0)
                                      for ell, p in enumerate(step_counts)] + [len(self._out_rows)]
        else:
            if any(lin_counts):
                raise InvalidInputError("identity neurons on a non-lin network")
            s = 0
            aug = [self.input_dim, *step_counts, len(self._out_rows)]
        widths = (self.input_dim, *step_counts, len(self._out_rows))

        skip_counts: list[int] = []
        layer_params: list[LayerParams] = []
        for layer_idx in range(L + 1):
            n_out, n_in = aug[layer_idx + 1], aug[layer_idx]
            rows_w: list[tuple[int, int, float]] = []
            rows_v: list[tuple[int, int, float]] = []
            bias = np.zeros(n_out)
            if layer_idx < L:
                for n in self.layers[layer_idx]:
                    bias[n.slot] = n.bias
                    if layer_idx == 0:
                        rows_w.extend((n.slot, k, w) for k, w in n.prev.items())
                    else:
                        rows_w.extend((n.slot, self._by_handle[h].slot, w)
                                      for h, w in n.prev.items())
                        rows_v.extend((n.slot, k, w) for k, w in n.inp.items())
            else:
                for r, row in enumerate(self._out_rows):
                    bias[r] = self._out_bias[r]
                    rows_w.extend((r, self._by_handle[h].slot, w) for h, w in row.items())
            W = self._pack(rows_w, (n_out, n_in))
            V = None
            if self.kind is NetworkKind.SKIP and 1 <= layer_idx <= L - 1:
                V = self._pack(rows_v, (n_out, self.input_dim))
                skip_counts.append(len({r for r, _, w in rows_v if w != 0.0}))
            # builder biases are additive constants; stages compute W h + V x - b
            layer_params.append(LayerParams(W, -bias, V))

        if self.kind is NetworkKind.SKIP:
            arch = Architecture(NetworkKind.SKIP, widths, tuple(skip_counts), 0)
        elif self.kind is NetworkKind.LIN:
            arch = Architecture(NetworkKind.LIN, widths, (), s)
        else:
            arch = Architecture(NetworkKind.PLAIN, widths, (), 0)
        net = Network(arch, tuple(layer_params))
        violations = validate(net)
        if violations:
            raise InvalidInputError(f"builder produced an invalid network: {violations[0]}")
        probes = {label: (self._by_handle[h].layer + 1, self._by_handle[h].slot)
                  for label, h in self.probes.items()}
        return net, probes

    def _pack(self, triples, shape):
        if self.sparse:
            if triples:
                r, c, v = zip(*triples)
            else:
                r, c, v = (), (), ()
            return sp.csr_matrix(
                sp.coo_matrix((np.array(v, dtype=float),
                               (np.array(r, dtype=int), np.array(c, dtype=int))),
                              shape=shape))
        M = np.zeros(shape)
        for r, c, v in triples:
            M[r, c] += v
        return M
