"""Nominal and compound outage capacity.

``C = max{R : P_out(eps(R)) <= delta}`` found by bisection on the rate, with
``eps(R)`` supplied as a callback (closed form or a Monte Carlo map built on
fixed draws, see :func:`robust_outage.channel.mc_eps_of_rate`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .compound import compound_outage
from .core import (
    BracketError,
    ClassKind,
    DomainError,
    UncertaintyClass,
    check_probability,
    check_radius,
)
from .reverse_kl import SMALL_D_LIMIT

RATE_TOL = 1e-6


@dataclass(frozen=True)
class CapacityQuery:
    """``uclass=None`` is the nominal problem (no uncertainty)."""

    delta: float
    uclass: Optional[UncertaintyClass]
    eps_of_rate: Callable[[float], float]
    rate_bracket: tuple[float, float]

    def __post_init__(self):
        check_probability(self.delta, "delta")
        lo, hi = self.rate_bracket
        if not 0.0 <= lo < hi < math.inf:
            raise DomainError(f"invalid rate bracket {self.rate_bracket}")


def default_rate_max(snr: float, n_min: int = 1, trace: float = 1.0) -> float:
    """Generous upper end of the rate search, ``ln(1 + snr n_min trace) + 10`` nats."""
    return math.log1p(snr * n_min * trace) + 10.0


def outage_of_rate(q: CapacityQuery, rate: float) -> float:
    eps = q.eps_of_rate(rate)
    if q.uclass is None:
        return eps
    return compound_outage(eps, q.uclass)


def outage_capacity(q: CapacityQuery, rate_tol: float = RATE_TOL) -> float:
    """Largest rate in the bracket whose (compound) outage does not exceed ``delta``.

    Returns the bracket floor when even that rate violates the target, and
    exactly 0 for the reverse KL class below its floor ``1 - e^{-d}``.  Raises
    :class:`BracketError` when the top of the bracket still meets the target.
    """
    lo, hi = q.rate_bracket
    if (q.uclass is not None and q.uclass.kind is ClassKind.REVERSE_KL
            and q.delta < capacity_floor(q.uclass.d)):
        return 0.0
    if outage_of_rate(q, hi) <= q.delta:
        raise BracketError(f"outage at R_max={hi:g} is still <= delta={q.delta:g}; widen the bracket")
    if outage_of_rate(q, lo) > q.delta:
        return lo
    while hi - lo > rate_tol:
        mid = 0.5 * (lo + hi)
        if outage_of_rate(q, mid) <= q.delta:
            lo = mid
        else:
            hi = mid
    return lo


def capacity_floor(d: float) -> float:
    """Targets below ``1 - e^{-d}`` admit no positive rate in the reverse KL class."""
    return -math.expm1(-check_radius(d))


def capacity_loss_bound(delta: float, d: float, nominal_capacity_at: Callable[[float], float]) -> float:
    """Upper bound ``C_0(delta - d)`` on the reverse-class capacity, valid for small ``d``."""
    delta = check_probability(delta, "delta")
    d = check_radius(d)
    if d > SMALL_D_LIMIT:
        raise DomainError(f"loss bound only holds for d <= {SMALL_D_LIMIT}, got {d}")
    if not delta > d:
        raise DomainError(f"needs delta > d, got delta={delta}, d={d}")
    return nominal_capacity_at(delta - d)
