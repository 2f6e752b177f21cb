"""Explicit network constructions with proven guarantees.

Every builder is a pure function of its arguments and safe to call
concurrently; caller-supplied oracles must be reentrant.
"""

from .basic import (
    PieceSpec,
    hyperrectangle_indicator,
    lipschitz_grid_approx,
    parity_network,
    piecewise_constant_1d,
    xor_network,
)
from .bits import binary_bit_extractor_lin, mixed_radix_bit_extractor
from .built import BuiltNetwork, Construction, Guarantee
from .decoders import BitTable, CellGeometry, decoder
from .holder import HolderConfig, alpha_positions, holder_approximator, multi_indices
from .shatter import shatter_budgets, shatter_points, shattering_net
from .square import square_approximator
from .stacking import stack_on_hidden

__all__ = [
    "BuiltNetwork", "Construction", "Guarantee",
    "PieceSpec", "hyperrectangle_indicator", "parity_network", "xor_network",
    "piecewise_constant_1d", "lipschitz_grid_approx",
    "mixed_radix_bit_extractor", "binary_bit_extractor_lin",
    "BitTable", "CellGeometry", "decoder",
    "square_approximator",
    "shattering_net", "shatter_points", "shatter_budgets",
    "HolderConfig", "holder_approximator", "multi_indices", "alpha_positions",
    "stack_on_hidden",
]
