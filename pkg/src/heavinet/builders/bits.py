"""Digit-extraction networks.

The skip extractor exposes, for a radix vector ``(d_1, ..., d_L)``, the
threshold readouts ``step(b_l(x) >= t)`` of the mixed-radix digits of x in
its last hidden layer: layer l carries all readouts for digits 1..l, the
``d_l - 1`` new ones tap the raw input through a skip row and subtract the
running truncation, which is an affine function of the earlier readouts.

The lin extractors work in base two.  The wide variant carries x in one
identity neuron and accumulates the digits so the last hidden layer holds
all of them; the narrow variant keeps only the current digit and the
remainder ``x - sum b_i 2^{-i}``, so layer l contains digit l.

The ``grow_*`` helpers emit the same structures into an existing builder,
one shared layer per digit level across any number of input coordinates;
the larger constructions stack their own machinery on top of them.
"""

from __future__ import annotations

from ..errors import InvalidInputError, PrecisionError
from ..networks import NetworkKind
from ..radix import radix_products
from .built import BuiltNetwork, Construction
from .dsl import NetBuilder

__all__ = [
    "mixed_radix_bit_extractor",
    "binary_bit_extractor_lin",
    "grow_radix_readouts",
    "grow_binary_bits_lin",
]


def grow_radix_readouts(nb: NetBuilder, radix, coords=(0,)) -> dict[tuple[int, int, int], int]:
    """Grow digit-threshold readouts for each input coordinate in ``coords``.

    Adds one hidden layer per digit level; afterwards the last layer holds
    handles for ``step(b_l(x_i) >= t)`` keyed by ``(i, l, t)``.  Levels past
    the first tap the input through skip rows, so ``nb`` must be a skip
    builder whenever ``len(radix) > 1``.
    """
    prods = radix_products(radix)
    nb.new_layer()
    current = {(i, 1, t): nb.step({i: 1.0}, bias=-t / prods[0])
               for i in coords for t in range(1, radix[0])}
    for ell in range(2, len(radix) + 1):
        # running truncation sum_{r<ell} b_r/S_r enters through the previous
        # layer's readouts; the raw input arrives through a skip row
        trunc = {i: {h: -1.0 / prods[r - 1]
                     for (j, r, _), h in current.items() if j == i}
                 for i in coords}
        nb.new_layer()
        carried = {key: nb.forward(h) for key, h in current.items()}
        for i in coords:
            for t in range(1, radix[ell - 1]):
                carried[(i, ell, t)] = nb.step(dict(trunc[i]),
                                               bias=-t / prods[ell - 1], inp={i: 1.0})
        current = carried
    return current


def grow_binary_bits_lin(nb: NetBuilder, nbits: int, coords=(0,)) -> dict[tuple[int, int], int]:
    """Grow the wide binary extractors: after ``nbits`` layers the last one
    holds ``b_l(x_i)`` for every coordinate and level, keyed by ``(i, l)``.
    One identity neuron per coordinate carries x_i between layers."""
    nb.new_layer()
    digits = {(i, 1): nb.step({i: 1.0}, bias=-0.5) for i in coords}
    carriers = {i: nb.linear({i: 1.0}) for i in coords} if nbits > 1 else {}
    for ell in range(2, nbits + 1):
        rows = {i: {carriers[i]: 1.0,
                    **{h: -(2.0 ** -r) for (j, r), h in digits.items() if j == i}}
                for i in coords}
        nb.new_layer()
        new_digits = {key: nb.forward(h) for key, h in digits.items()}
        for i in coords:
            new_digits[(i, ell)] = nb.step(rows[i], bias=-(2.0 ** -ell))
        if ell < nbits:
            carriers = {i: nb.linear({carriers[i]: 1.0}) for i in coords}
        digits = new_digits
    return digits


def mixed_radix_bit_extractor(radix) -> BuiltNetwork:
    """Skip network exposing ``step(b_l(x) >= t)`` for every digit and level.

    Probes ``d{l}>={t}`` point at the last hidden layer, where all readouts
    are present; the output is the truncation ``sum_l b_l(x) / (d_1...d_l)``.
    """
    radix = tuple(int(d) for d in radix)
    if not radix or any(d < 2 for d in radix):
        raise InvalidInputError("radix entries must be integers >= 2")
    prods = radix_products(radix)
    if prods[-1] > 2**52:
        raise PrecisionError(f"radix product {prods[-1]} exceeds 2^52")
    nb = NetBuilder(1, NetworkKind.SKIP)
    current = grow_radix_readouts(nb, radix)
    for (_, ell, t), h in current.items():
        nb.tag(f"d{ell}>={t}", h)
    out_row = {h: 1.0 / prods[ell - 1] for (_, ell, t), h in current.items()}
    nb.output([out_row], [0.0])
    net, probes = nb.build()
    return BuiltNetwork(net, None, probes,
                        Construction("mixed_radix_bit_extractor", {"radix": list(radix)}))


def binary_bit_extractor_lin(L: int, variant: str = "narrow") -> BuiltNetwork:
    """Lin network exposing the binary digits ``b_1(x)..b_L(x)``.

    ``wide``: one identity neuron carries x; layer l holds digits 1..l, the
    last hidden layer all of them (probes ``b{l}`` point there).
    ``narrow``: layer l holds digit l and the remainder; probes ``b{l}``
    point at layer l.
    """
    if L < 1:
        raise InvalidInputError("binary extractor: L must be >= 1")
    if L > 52:
        raise PrecisionError(f"binary extractor: L={L} digits exceed a float64 significand")
    if variant not in ("wide", "narrow"):
        raise InvalidInputError(f"binary extractor: unknown variant {variant!r}")
    nb = NetBuilder(1, NetworkKind.LIN)
    if variant == "wide":
        digits = grow_binary_bits_lin(nb, L)
        for (_, r), h in digits.items():
            nb.tag(f"b{r}", h)
        nb.output([{h: 2.0 ** -r for (_, r), h in digits.items()}], [0.0])
    else:
        nb.new_layer()
        bit = nb.tag("b1", nb.step({0: 1.0}, bias=-0.5))
        rem = nb.linear({0: 1.0}) if L > 1 else None
        for ell in range(2, L + 1):
            row = {rem: 1.0, bit: -(2.0 ** -(ell - 1))}
            nb.new_layer()
            new_bit = nb.tag(f"b{ell}", nb.step(dict(row), bias=-(2.0 ** -ell)))
            if ell < L:
                rem = nb.linear(dict(row))
            bit = new_bit
        nb.output([{bit: 1.0}], [0.0])
    net, probes = nb.build()
    return BuiltNetwork(net, None, probes,
                        Construction("binary_bit_extractor_lin", {"L": L, "variant": variant}))
