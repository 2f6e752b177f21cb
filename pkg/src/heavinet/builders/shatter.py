"""Point-set shattering networks.

The point set for digit budget ``levels`` is the cell centers
``z_i = i / 2^levels - 1 / 2^(levels+1)`` for ``i = 1..2^levels``.  Given a
0/1 labeling of the points, the labels are stored as the decoder table
``eta[j, k, r] = label(z_i)`` for the cell (j, k, r) containing ``z_i``,
and a digit extractor is stacked under the matching decoder.  The network
output is ``label - 1/2``, so thresholding the output recovers the label
exactly at every point.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError, ResourceLimitError
from ..networks import NetworkKind
from .bits import grow_binary_bits_lin, grow_radix_readouts
from .built import BuiltNetwork, Construction
from .decoders import BitTable, CellGeometry, grow_lin_decoder, grow_skip_decoder_bank
from .dsl import NetBuilder

__all__ = ["shatter_points", "shattering_net", "labels_to_table", "shatter_budgets"]

MAX_POINT_BITS = 20  # enumerating labelings needs 2^points <= 2^20


def _geometry(kind: str, m: int, n: int, t: int = 0) -> CellGeometry | None:
    if kind not in ("skip", "lin"):
        raise InvalidInputError(f"unknown kind {kind!r}")
    levels = 2 * m + n if kind == "skip" else m + n + 2 * t
    if levels == 0:
        return None  # degenerate single-point geometry
    if levels > MAX_POINT_BITS:
        raise ResourceLimitError(f"{2**levels} points exceed the 2^{MAX_POINT_BITS} cap")
    return CellGeometry(kind, 1, m, n, t)


def shatter_points(kind: str, m: int, n: int, t: int = 0) -> np.ndarray:
    """The canonical point set: one point at the center of every dyadic cell."""
    geom = _geometry(kind, m, n, t)
    if geom is None:
        return np.array([0.5])
    count = 2 ** geom.levels
    i = np.arange(1, count + 1, dtype=float)
    return i / count - 1.0 / (2 * count)


def labels_to_table(geom: CellGeometry, labeling) -> BitTable:
    """Store point labels in decoder-table order: point i sits in the cell
    whose digit prefix is i-1 written big-endian."""
    levels = geom.levels
    labeling = np.asarray(labeling, dtype=int).reshape(-1)
    if labeling.size != 2 ** levels:
        raise InvalidInputError(f"labeling needs {2 ** levels} entries")
    payload = np.zeros(geom.sizes, dtype=int)
    for i, lab in enumerate(labeling):
        bits = [(i >> (levels - 1 - pos)) & 1 for pos in range(levels)]
        j, k, r = geom.index_of_bits(np.array(bits).reshape(1, levels))
        payload[j - 1, k - 1, r - 1] = int(lab)
    return BitTable(geom, payload)


def shatter_budgets(kind: str, m: int, n: int, t: int = 0) -> dict[str, int]:
    """Depth/width budgets the construction may not exceed."""
    if kind == "skip":
        K = 2 ** m
        return {"depth": 2 * m + n + 2 ** n + 4, "width": 2 * m + n + 6 * K + 5}
    K = 2 ** n
    return {"depth": m + n + 2 * t + 2 * 2 ** t + 2,
            "width": m + n + 2 * t + max(2 ** m, 3 * K + 1),
            "identity_neurons": K}


def shattering_net(kind: str, m: int, n: int, t: int = 0,
                   labeling=None) -> tuple[BuiltNetwork, np.ndarray]:
    """Build a network realizing the labeling on the canonical point set.

    Returns the built network and the points; ``step(output)`` at point i
    equals ``labeling[i]`` exactly.
    """
    points = shatter_points(kind, m, n, t)
    labeling = np.asarray(labeling, dtype=int).reshape(-1)
    if labeling.size != points.size or not np.all((labeling == 0) | (labeling == 1)):
        raise InvalidInputError(f"labeling must be {points.size} bits")
    params = {"kind": kind, "m": m, "n": n, "t": t,
              "labeling": "".join(str(int(b)) for b in labeling)}

    geom = _geometry(kind, m, n, t)
    if geom is None:  # one point: a constant network decides its label
        nb = NetBuilder(1, NetworkKind.SKIP if kind == "skip" else NetworkKind.LIN)
        nb.new_layer()
        h = nb.tag("label", nb.step({0: 0.0}, bias=float(labeling[0]) - 0.5))
        nb.output([{h: 1.0}], [-0.5])
        net, probes = nb.build()
        return BuiltNetwork(net, None, probes, Construction("shattering_net", params)), points

    table = labels_to_table(geom, labeling)
    levels = geom.levels
    if kind == "skip":
        nb = NetBuilder(1, NetworkKind.SKIP)
        readouts = grow_radix_readouts(nb, (2,) * levels)
        bits = [readouts[(0, ell, 1)] for ell in range(1, levels + 1)]
        (parts,), _ = grow_skip_decoder_bank(nb, [table], bits)
        nb.new_layer()
        label = nb.tag("label", nb.step({h: 1.0 for h in parts}, bias=-0.5))
        nb.output([{label: 1.0}], [-0.5])
    else:
        nb = NetBuilder(1, NetworkKind.LIN)
        digits = grow_binary_bits_lin(nb, levels)
        bits = [digits[(0, ell)] for ell in range(1, levels + 1)]
        parts, _ = grow_lin_decoder(nb, table, bits)
        nb.output([{h: 1.0 for h in parts}], [-0.5])
    net, probes = nb.build()
    return BuiltNetwork(net, None, probes, Construction("shattering_net", params)), points
