"""Closed-form calculators: piece-count ceilings, capacity upper bounds,
and the matching approximation-error floor."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvalidInputError
from ..networks import Architecture, NetworkKind

__all__ = ["piece_bound", "approx_lower_bound", "vc_upper_bound", "BoundReport", "bound_report"]


def piece_bound(arch: Architecture) -> int:
    """Most pieces any segment restriction of this architecture can have.

    plain: p_1 + 1; skip: (p_1 + 1) prod_l (s_l + 1); lin: prod_l (p_l + 1)
    over the step widths.
    """
    hidden = arch.hidden_widths
    if not hidden:
        raise InvalidInputError("piece bound needs at least one hidden layer")
    if arch.kind is NetworkKind.PLAIN:
        return hidden[0] + 1
    if arch.kind is NetworkKind.SKIP:
        total = hidden[0] + 1
        for s in arch.skip_counts:
            total *= s + 1
        return total
    total = 1
    for p in hidden:
        total *= p + 1
    return total


def approx_lower_bound(value_range: tuple[float, float], arch: Architecture) -> float:
    """Sup-norm error floor for approximating any continuous target whose
    values span ``value_range``: (sup - inf) / (2 * piece bound)."""
    lo, hi = float(value_range[0]), float(value_range[1])
    if hi < lo:
        raise InvalidInputError("value range must satisfy sup >= inf")
    return (hi - lo) / (2.0 * piece_bound(arch))


def _rectangular(arch: Architecture) -> tuple[int, int, int] | None:
    """(L, p, s) when every hidden layer has equal width (and skip budget)."""
    hidden = arch.hidden_widths
    if len(set(hidden)) != 1:
        return None
    p = hidden[0]
    if arch.kind is NetworkKind.SKIP:
        if arch.skip_counts and len(set(arch.skip_counts)) != 1:
            return None
        s = arch.skip_counts[0] if arch.skip_counts else 0
    elif arch.kind is NetworkKind.LIN:
        s = arch.lin_count
    else:
        s = 0
    return arch.depth, p, s


def vc_upper_bound(arch: Architecture) -> float | None:
    """Closed-form capacity ceiling for rectangular architectures.

    skip (and plain, a skip network with empty taps):
    ``30 L p^2 log2(L p)``; lin: ``30 max(L^2 p s, L p^2) log2(L p)``.
    Requires width p >= max(input dim, augmentation, 2); returns None when
    the formula's precondition is unmet, never a fabricated number.
    """
    rect = _rectangular(arch)
    if rect is None:
        return None
    L, p, s = rect
    if p < max(arch.input_dim, s, 2):
        return None
    if arch.kind is NetworkKind.LIN:
        lead = max(L * L * p * s, L * p * p)
    else:
        lead = L * p * p
    return 30.0 * lead * math.log2(L * p)


@dataclass(frozen=True)
class BoundReport:
    """The closed-form numbers for one architecture."""

    kind: str
    depth: int
    widths: tuple[int, ...]
    piece_bound: int
    vc_upper_bound: float | None
    approx_lower_bound: float
    note: str = ""


def bound_report(arch: Architecture, value_range: tuple[float, float] = (0.0, 1.0)) -> BoundReport:
    vc = vc_upper_bound(arch)
    note = "" if vc is not None else "vc formula precondition unmet (needs rectangular width >= max(d, s, 2))"
    return BoundReport(arch.kind.value, arch.depth, arch.widths,
                       piece_bound(arch), vc,
                       approx_lower_bound(value_range, arch), note)
