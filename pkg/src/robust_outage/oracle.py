"""Brute-force reference values for the compound outage problems.

Only the outage-set mass of the worst law matters, and the log-sum inequality
gives ``D(f || f0) >= kl(p, eps)`` and ``D(f0 || f) >= kl(eps, p)``, so both
KL classes reduce to a one-dimensional Bernoulli feasibility question solved
here by plain bisection.  ``oracle_discrete`` checks that reduction itself: it
solves the full optimization over every law on a finite support with a
general-purpose conic solver, with no structural assumption on the optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BracketError,
    ClassKind,
    DomainError,
    UncertaintyClass,
    bernoulli_kl,
    check_probability,
    check_radius,
)

BISECTION_DEPTH = 60


@dataclass(frozen=True)
class OracleResult:
    p_star: float
    iterations: int
    residual: float


def _bisect_max_feasible(div, lo: float, hi: float, d: float) -> OracleResult:
    # largest p in [lo, hi] with div(p) <= d, div increasing on [lo, hi]
    for _ in range(BISECTION_DEPTH):
        mid = 0.5 * (lo + hi)
        if div(mid) <= d:
            lo = mid
        else:
            hi = mid
    return OracleResult(lo, BISECTION_DEPTH, abs(div(lo) - d))


def oracle_forward(eps: float, d: float) -> OracleResult:
    """``max{p in [eps, 1] : kl(p, eps) <= d}`` by bisection."""
    eps = check_probability(eps)
    d = check_radius(d)
    if d == 0.0 or eps in (0.0, 1.0):
        return OracleResult(eps, 0, 0.0)
    if bernoulli_kl(1.0, eps) <= d:
        return OracleResult(1.0, 0, 0.0)
    return _bisect_max_feasible(lambda p: bernoulli_kl(p, eps), eps, 1.0, d)


def oracle_reverse(eps: float, d: float) -> OracleResult:
    """``max{p in [eps, 1) : kl(eps, p) <= d}`` by bisection; ``eps = 0`` gives ``1 - e^{-d}``."""
    eps = check_probability(eps)
    d = check_radius(d)
    if d == 0.0 or eps == 1.0:
        return OracleResult(eps, 0, 0.0)
    if eps == 0.0:
        # kl(0, p) = -ln(1 - p) <= d
        return OracleResult(-math.expm1(-d), 0, 0.0)
    return _bisect_max_feasible(lambda p: bernoulli_kl(eps, p), eps, 1.0, d)


def oracle_scalar(eps: float, uclass: UncertaintyClass) -> float:
    if uclass.kind is ClassKind.FORWARD_KL:
        return oracle_forward(eps, uclass.d).p_star
    if uclass.kind is ClassKind.REVERSE_KL:
        return oracle_reverse(eps, uclass.d).p_star
    if uclass.kind is ClassKind.LP_BALL and uclass.p == 1.0:
        return min(1.0, eps + 0.5 * uclass.d)
    raise DomainError(f"no scalar oracle for {uclass}")


def oracle_discrete(probs, outage_mask, uclass: UncertaintyClass) -> float:
    """Outage mass of the worst law on the support of ``probs``.

    Solves ``max_q sum(q[mask])`` over the whole simplex subject to the
    divergence constraint of ``uclass`` (forward KL, reverse KL, or the L1
    ball), using cvxpy.
    """
    import cvxpy as cp

    probs = np.asarray(probs, dtype=float)
    mask = np.asarray(outage_mask, dtype=bool)
    if probs.ndim != 1 or probs.shape != mask.shape:
        raise DomainError("probs and outage_mask must be 1-D of equal length")
    if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > 1e-12:
        raise DomainError("probs must be a probability vector")
    d = uclass.d
    eps = float(probs[mask].sum())
    if not mask.any():
        return 0.0
    if mask.all() or d == 0.0:
        return eps

    q = cp.Variable(probs.size, nonneg=True)
    if uclass.kind is ClassKind.FORWARD_KL:
        # q must vanish off the support of probs for a finite divergence
        support = probs > 0.0
        constraint = cp.sum(cp.rel_entr(q[support], probs[support])) <= d
        extra = [q[~support] == 0.0] if (~support).any() else []
    elif uclass.kind is ClassKind.REVERSE_KL:
        support = probs > 0.0
        constraint = cp.sum(cp.rel_entr(probs[support], q[support])) <= d
        extra = []
    elif uclass.kind is ClassKind.LP_BALL and uclass.p == 1.0:
        constraint = cp.norm1(q - probs) <= d
        extra = []
    else:
        raise DomainError(f"no discrete oracle for {uclass}")

    problem = cp.Problem(cp.Maximize(cp.sum(q[mask])), [cp.sum(q) == 1.0, constraint, *extra])
    try:
        problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10,
                      tol_feas=1e-10)
    except cp.SolverError as exc:
        raise BracketError(f"support cannot carry the constraint: {exc}") from exc
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise BracketError(f"support cannot carry the constraint ({problem.status})")
    return float(min(max(problem.value, eps), 1.0))
