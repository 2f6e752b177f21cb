"""Shattering certificates by direct labeling enumeration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..builders.shatter import MAX_POINT_BITS, shatter_budgets, shatter_points, shattering_net
from ..errors import ResourceLimitError
from ..networks import evaluate_batch

__all__ = ["ShatterCertificate", "shatter_verify"]


@dataclass
class ShatterCertificate:
    """Outcome of realizing labelings of the construction's point set.

    ``implied_vc_lower_bound`` equals the point count iff no labeling
    failed; a non-exhaustive certificate (sampled labelings) is evidence
    for the construction rather than a complete proof, and says so in
    ``exhaustive``.
    """

    kind: str
    geometry: dict
    points: np.ndarray
    labelings_tried: int
    failures: list[str] = field(default_factory=list)
    exhaustive: bool = True
    budgets_respected: bool = True

    @property
    def implied_vc_lower_bound(self) -> int:
        return len(self.points) if not self.failures else 0

    def to_document(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "geometry": self.geometry,
            "points": [float(z) for z in self.points],
            "labelings_tried": self.labelings_tried,
            "failures": list(self.failures),
            "exhaustive": self.exhaustive,
            "budgets_respected": self.budgets_respected,
            "implied_vc_lower_bound": self.implied_vc_lower_bound,
        }, indent=1)


def _within_budgets(built, kind: str, m: int, n: int, t: int) -> bool:
    budget = shatter_budgets(kind, m, n, t)
    arch = built.net.arch
    if arch.depth > budget["depth"]:
        return False
    if max(arch.hidden_widths) > budget["width"]:
        return False
    if kind == "lin" and arch.lin_count > budget.get("identity_neurons", 0):
        return False
    return True


def shatter_verify(kind: str, m: int, n: int, t: int = 0,
                   sample_labelings: int | None = None, seed: int = 0) -> ShatterCertificate:
    """Build and check the shattering construction for every labeling.

    All ``2^points`` labelings are enumerated when that count stays within
    ``2^20``; otherwise ``sample_labelings`` structured-plus-random
    labelings are checked (required for large geometries).
    """
    points = shatter_points(kind, m, n, t)
    npts = len(points)
    exhaustive = sample_labelings is None
    if exhaustive and npts > MAX_POINT_BITS:
        raise ResourceLimitError(
            f"{2**npts} labelings of {npts} points exceed the 2^{MAX_POINT_BITS} cap; "
            "pass sample_labelings to spot-check")

    if exhaustive:
        labelings = ((i >> np.arange(npts - 1, -1, -1)) & 1 for i in range(2**npts))
        tried = 2**npts
    else:
        rng = np.random.default_rng(seed)
        fixed = [np.zeros(npts, dtype=int), np.ones(npts, dtype=int),
                 np.arange(npts) % 2, (np.arange(npts) + 1) % 2]
        fixed.extend(np.eye(npts, dtype=int)[i] for i in range(min(npts, 32)))
        rand = [rng.integers(0, 2, npts) for _ in range(max(0, sample_labelings - len(fixed)))]
        labelings = fixed + rand
        tried = len(labelings)

    failures: list[str] = []
    budgets_ok = True
    X = points[:, None]
    for lam in labelings:
        lam = np.asarray(lam, dtype=int)
        built, _ = shattering_net(kind, m, n, t, lam)
        budgets_ok = budgets_ok and _within_budgets(built, kind, m, n, t)
        out = evaluate_batch(built.net, X)[:, 0]
        realized = (out >= 0.0).astype(int)
        if not np.array_equal(realized, lam):
            failures.append("".join(str(int(b)) for b in lam))
    return ShatterCertificate(kind, {"m": m, "n": n, "t": t}, points, tried,
                              failures, exhaustive, budgets_ok)
