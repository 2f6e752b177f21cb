"""Skip-network approximation of the square function on [0, 1].

The first L-1 hidden layers extract the mixed-radix digits of x for the
radix vector ``(p_1+1, s_2+1, ..., s_{L-1}+1)``; the truncation xt then
satisfies ``xt <= x <= xt + 1/S`` with ``S = (p_1+1) prod (s_l+1)``.  The
last hidden layer multiplies every pair of digit readouts through the AND
identity ``step(a + b - 3/2)``, and the output expands

    (xt + 1/(2S))^2

as an affine function of those products.  The sup error is at most ``1/S``.
"""

from __future__ import annotations

from ..errors import InvalidInputError, PrecisionError
from ..networks import NetworkKind
from ..radix import radix_products
from .bits import grow_radix_readouts
from .built import BuiltNetwork, Construction, Guarantee
from .dsl import NetBuilder

__all__ = ["square_approximator"]


def square_approximator(L: int, p1: int, skips) -> BuiltNetwork:
    """Network of depth L computing ``(xt + 1/(2S))^2``; skips = (s_2..s_L).

    The last skip budget must be zero: the product layer has no input taps.
    Width vector is exactly ``(1, p_1, p_1+s_2, ..., p_1 + sum s_l,
    B(B+1)/2, 1)`` with ``B = p_1 + s_2 + ... + s_{L-1}``.
    """
    skips = tuple(int(s) for s in skips)
    if L < 2 or p1 < 1:
        raise InvalidInputError("square approximator needs L >= 2 and p1 >= 1")
    if len(skips) != L - 1:
        raise InvalidInputError(f"skips must have length L-1 = {L - 1}")
    if skips[-1] != 0:
        raise InvalidInputError("square approximator requires s_L = 0")
    if any(s < 0 for s in skips):
        raise InvalidInputError("skip budgets must be non-negative")

    radix = (p1 + 1, *(s + 1 for s in skips[:-1]))
    prods = radix_products(radix)
    if prods[-1] > 2**26:
        raise PrecisionError("digit grid finer than 2^-26: squared weights would "
                             "leave the float64 significand")
    S = prods[-1]
    half_cell = 1.0 / (2 * S)

    nb = NetBuilder(1, NetworkKind.SKIP)
    readouts = grow_radix_readouts(nb, radix)
    for (_, ell, t), h in readouts.items():
        nb.tag(f"d{ell}>={t}", h)
    handles = sorted(readouts.items())  # [((0, ell, t), handle)] position-major

    nb.new_layer()
    products: dict[tuple[int, int], int] = {}
    for i, (_, hi) in enumerate(handles):
        for j in range(i, len(handles)):
            hj = handles[j][1]
            if i == j:
                products[(i, j)] = nb.step({hi: 2.0}, bias=-1.5)
            else:
                products[(i, j)] = nb.step({hi: 1.0, hj: 1.0}, bias=-1.5)

    # (sum_l b_l/S_l + c)^2 expanded over readout products; b_l = sum_t readouts
    coeff = [1.0 / prods[ell - 1] for (_, ell, _), _ in handles]
    row: dict[int, float] = {}
    for (i, j), h in products.items():
        if i == j:
            row[h] = coeff[i] * coeff[i] + 2.0 * half_cell * coeff[i]
        else:
            row[h] = 2.0 * coeff[i] * coeff[j]
    nb.output([row], [half_cell * half_cell])
    net, probes = nb.build()

    bound = 1.0 / (S * (skips[-1] + 1))
    params = {"L": L, "p1": p1, "skips": list(skips)}
    return BuiltNetwork(net, Guarantee(bound, 1), probes,
                        Construction("square_approximator", params))
