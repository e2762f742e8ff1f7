"""Lower-bound chain for the Lp-ball class ``||f - f0||_p <= d``.

No exact worst case is claimed for ``p > 1``.  A KL ball of radius ``d^2/2``
sits inside the L1 ball of radius ``d`` (Pinsker, ``D >= ||f - f0||_1^2 / 2``),
so both KL compound outages at that radius bound the L1 worst case from below.
The exact L1 worst case, moving mass ``d/2`` into the outage set, is provided
separately as ``tv_exact_outage``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DomainError, check_probability, check_radius
from .forward_kl import solve_forward
from .reverse_kl import solve_reverse


@dataclass(frozen=True)
class LpBoundChain:
    p: float
    d: float
    eps: float
    p1_via_forward: float
    p1_via_reverse: float
    floor_with_eps: float
    floor: float

    @property
    def best(self) -> float:
        return max(self.p1_via_forward, self.p1_via_reverse)

    def members(self) -> dict[str, float]:
        return {
            "p1_via_forward": self.p1_via_forward,
            "p1_via_reverse": self.p1_via_reverse,
            "floor_with_eps": self.floor_with_eps,
            "floor": self.floor,
        }


def lp_lower_bounds(p: float, d: float, eps: float) -> LpBoundChain:
    if not p >= 1.0:
        raise DomainError(f"norm order must be >= 1, got {p!r}")
    d = check_radius(d)
    eps = check_probability(eps)
    kl_radius = 0.5 * d * d
    shrink = math.exp(-kl_radius)
    return LpBoundChain(
        p=float(p),
        d=d,
        eps=eps,
        p1_via_forward=solve_forward(eps, kl_radius).p_out,
        p1_via_reverse=solve_reverse(eps, kl_radius).p_out,
        floor_with_eps=-math.expm1(-kl_radius) + shrink * eps,
        floor=-math.expm1(-kl_radius),
    )


def tv_exact_outage(d: float, eps: float) -> float:
    """Worst-case outage over the L1 ball of radius ``d``: ``min(1, eps + d/2)``."""
    d = check_radius(d)
    eps = check_probability(eps)
    return min(1.0, eps + 0.5 * d)
