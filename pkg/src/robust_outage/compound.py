"""One entry point over every uncertainty class."""
from __future__ import annotations

from .core import (
    BoundOnly,
    ClassKind,
    CompoundSolution,
    ForwardDual,
    ReverseRoot,
    UncertaintyClass,
    check_probability,
)
from .forward_kl import classify_regime, solve_forward
from .lp_bounds import lp_lower_bounds, tv_exact_outage
from .reverse_kl import solve_reverse


def compound_outage(eps: float, uclass: UncertaintyClass) -> float:
    """Worst-case outage probability only; the cheap path used by sweeps and capacity search."""
    if uclass.kind is ClassKind.FORWARD_KL:
        return solve_forward(eps, uclass.d).p_out
    if uclass.kind is ClassKind.REVERSE_KL:
        return solve_reverse(eps, uclass.d).p_out
    return solve(eps, uclass).p_out


def solve(eps: float, uclass: UncertaintyClass) -> CompoundSolution:
    """Compound outage with certificate, regime and bounds.

    For the Lp ball ``p_out`` is the best certified lower bound (exact for
    ``p = 1``), and the certificate is ``BoundOnly``.
    """
    eps = check_probability(eps)
    d = uclass.d
    if uclass.kind is ClassKind.FORWARD_KL:
        r = solve_forward(eps, d)
        return CompoundSolution(r.p_out, uclass, eps, ForwardDual(r.s_star, r.y_star),
                                classify_regime(eps, d), r.bounds[0], r.bounds[1])
    if uclass.kind is ClassKind.REVERSE_KL:
        r = solve_reverse(eps, d)
        return CompoundSolution(r.p_out, uclass, eps, ReverseRoot(r.mu, r.lambda_star),
                                classify_regime(eps, d), r.bounds[0], 1.0)
    chain = lp_lower_bounds(uclass.p, d, eps)
    lower = max(chain.best, eps)
    if uclass.p == 1.0:
        exact = tv_exact_outage(d, eps)
        return CompoundSolution(exact, uclass, eps, BoundOnly(), classify_regime(eps, d), lower, exact)
    return CompoundSolution(lower, uclass, eps, BoundOnly(), classify_regime(eps, d), lower, 1.0)
