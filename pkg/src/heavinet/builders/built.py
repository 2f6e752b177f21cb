"""Built networks: a network plus the metadata its construction proves."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidInputError
from ..networks import Network, validate

__all__ = ["Guarantee", "Construction", "BuiltNetwork"]


@dataclass(frozen=True)
class Guarantee:
    """Proven sup-norm error bound on the unit hypercube of the given dim."""

    sup_error_bound: float
    domain_dim: int = 1


@dataclass(frozen=True)
class Construction:
    name: str
    parameters: dict = field(default_factory=dict)


@dataclass
class BuiltNetwork:
    """A network with its guarantee and a probe map locating semantic neurons.

    Probe positions are ``(hidden layer, neuron index)`` with layers numbered
    1..L and neurons 0-based within the layer's activation vector.
    """

    net: Network
    guarantee: Guarantee | None
    probes: dict[str, tuple[int, int]]
    construction: Construction

    def check(self) -> None:
        violations = validate(self.net)
        if violations:
            raise InvalidInputError(f"built network is invalid: {violations[0]}")
        ws = self.net.arch.augmented_widths()
        for label, (layer, idx) in self.probes.items():
            if not (1 <= layer <= self.net.arch.depth and 0 <= idx < ws[layer]):
                raise InvalidInputError(f"probe {label!r} points outside the network")

    def read_probes(self, trace) -> dict[str, float]:
        """Read every probe out of an activation trace for one input."""
        return {label: float(trace.hidden[layer - 1][idx])
                for label, (layer, idx) in self.probes.items()}
