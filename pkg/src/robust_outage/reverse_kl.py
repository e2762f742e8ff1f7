"""Compound outage under the reverse KL ball ``D(f0 || f) <= d``.

The worst-case law is ``f* = lambda* f0 / (mu - 1{outage})`` with ``mu > 1``
the root of ``mu^eps (mu - 1)^(1 - eps) / (mu - 1 + eps) = e^{-d}`` and
``lambda* = e^{-d} (mu - 1)^eps mu^(1 - eps)``.  The root is found in
``u = ln(mu - 1)``: ``mu`` approaches 1 when ``eps`` is small (so ``mu`` itself
would lose digits) and grows like ``sqrt(eps (1 - eps) / (2 d))`` as ``d -> 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    DomainError,
    WorstCaseRatio,
    check_probability,
    check_radius,
    expand_bracket,
    find_root,
    golden_minimize,
)

_U_MIN = -745.0
_U_MAX = 709.0
SMALL_D_LIMIT = 0.01


@dataclass(frozen=True)
class ReverseResult:
    p_out: float
    mu: float
    lambda_star: float
    floor: float
    bounds: tuple[float, float]
    approx_low_eps: float
    approx_low_d: float
    # mu - 1 carried separately; mu alone loses digits when it is close to 1
    mu_minus_one: float = math.nan


def log_mu_residual(t: float, eps: float, d: float) -> float:
    """Log of the root equation in ``t = mu - 1``, rewritten to avoid cancellation.

    ``eps ln mu + (1 - eps) ln(mu - 1) - ln(mu - 1 + eps) + d``
    ``= eps log1p((1 - eps)/(t + eps)) - (1 - eps) log1p(eps / t) + d``.
    """
    return eps * math.log1p((1.0 - eps) / (t + eps)) - (1.0 - eps) * math.log1p(eps / t) + d


def _solve_log_t(eps: float, d: float) -> float:
    def h(u):
        return log_mu_residual(math.exp(u), eps, d)

    # 2 sqrt(eps (1 - eps) / (2 d)) in logs; the ratio overflows for subnormal d
    log_scale = math.log(2.0) + 0.5 * (math.log(eps) + math.log1p(-eps) - math.log(2.0 * d))
    log_scale = min(max(log_scale, 0.0), _U_MAX)
    lo, hi = expand_bracket(h, math.log(1e-14), log_scale, step=4.0,
                            limit_lo=_U_MIN, limit_hi=_U_MAX)
    if h(lo) >= 0.0:
        # root sits below the smallest representable mu - 1
        return -math.inf
    # machine precision: near p = 1 any slack in u is amplified in kl(eps, p)
    return find_root(h, lo, hi, xtol_rel=0.0)


def solve_reverse(eps: float, d: float) -> ReverseResult:
    """Worst-case outage over ``{f : D(f0 || f) <= d}`` given nominal outage ``eps``.

    Analytic endpoints: ``d = 0`` gives ``eps``; ``eps = 0`` gives the floor
    ``1 - e^{-d}``; ``eps = 1`` gives 1.  Interior values are clamped to
    ``[eps, 1]``.
    """
    eps = check_probability(eps)
    d = check_radius(d)
    floor = -math.expm1(-d)
    bounds = reverse_floor_bounds(eps, d)
    approx_e = approx_reverse_low_eps(d)
    approx_d = approx_reverse_low_d(eps, d) if 0.0 < eps < 1.0 else eps

    def result(p, t, lam):
        return ReverseResult(p, 1.0 + t, lam, floor, bounds, approx_e, approx_d, t)

    if d == 0.0:
        return result(eps, math.inf, math.inf)
    if eps == 0.0:
        return result(floor, 0.0, math.exp(-d))
    if eps == 1.0:
        return result(1.0, 0.0, 0.0)

    u = _solve_log_t(eps, d)
    if u == -math.inf:
        return result(1.0, 0.0, 0.0)
    t = math.exp(u)
    lam = math.exp(-d + eps * u + (1.0 - eps) * math.log1p(t))
    # p = lam eps / t, formed in logs
    p = eps * math.exp(-d + (1.0 - eps) * math.log1p(1.0 / t))
    return result(min(max(p, eps), 1.0), t, lam)


def mu_of_lambda_minus_one(lam: float, eps: float) -> float:
    """``mu(lambda) - 1`` for ``mu = (1 + lam + sqrt((1 - lam)^2 + 4 lam eps)) / 2``.

    The difference is rationalized when ``lam < 1`` to keep relative accuracy.
    """
    a = 1.0 - lam
    b = 4.0 * lam * eps
    root = math.sqrt(a * a + b)
    if a > 0.0:
        return 0.5 * b / (root + a)
    return 0.5 * (root - a)


def reverse_dual_objective(lam: float, eps: float, d: float) -> float:
    """Dual function of the reverse class at multiplier ``lam > 0``.

    ``lam eps (1/(mu-1) + ln(mu/(mu-1))) + lam (d - ln(mu/lam))`` with the
    normalized ``mu(lam)``; ``mu - lam = lam eps / (mu - 1)`` is used for the
    last logarithm.
    """
    t = mu_of_lambda_minus_one(lam, eps)
    ratio = eps / t
    return lam * ratio + lam * eps * math.log1p(1.0 / t) + lam * d - lam * math.log1p(ratio)


def solve_reverse_dual(eps: float, d: float) -> tuple[float, float]:
    """Minimize the reverse-class dual over ``lam >= 0``; returns ``(p_out, lam_at_min)``.

    The dual is convex in ``lam`` and so unimodal in ``ln lam``: a unit-step
    scan in ``ln lam`` brackets the minimum (robust to the flat ``L ~ 1``
    plateau near ``lam = 0``), then golden-section search refines it.
    """
    eps = check_probability(eps)
    d = check_radius(d)
    if not (0.0 < eps < 1.0 and d > 0.0):
        raise DomainError(f"dual form needs 0 < eps < 1 and d > 0, got eps={eps}, d={d}")

    def objective(v):
        return reverse_dual_objective(math.exp(v), eps, d)

    # lam* ~ mu - 1 for small d and ~ e^{-d} (mu - 1)^eps otherwise
    v_hi = math.log1p(math.sqrt(1.0 / d)) + 3.0
    v_lo = max(-d + eps * (math.log(eps) - 1.0 - d / (1.0 - eps)) - 10.0, -740.0)
    n = int(math.ceil(v_hi - v_lo)) + 1
    grid = [v_lo + k * (v_hi - v_lo) / (n - 1) for k in range(n)]
    vals = [objective(v) for v in grid]
    k = min(range(n), key=vals.__getitem__)
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
    v, val = golden_minimize(objective, a, b, xtol_rel=1e-13)
    return min(max(val, eps), 1.0), math.exp(v)


def reverse_floor_bounds(eps: float, d: float) -> tuple[float, float]:
    """Lower bounds ``(1 - e^{-d} + e^{-d} eps, d + eps)``.

    The second is the small-``d`` form of the first and is only meaningful for
    ``d <= 0.01``; it overshoots the first by ``O(d^2 + d eps)``.
    """
    eps = check_probability(eps)
    d = check_radius(d)
    return -math.expm1(-d) + math.exp(-d) * eps, d + eps


def small_d_bound_valid(d: float) -> bool:
    return d <= SMALL_D_LIMIT


def approx_reverse_low_eps(d: float) -> float:
    """Error floor ``1 - e^{-d}``; accurate once ``eps << e^d - 1``."""
    return -math.expm1(-check_radius(d))


def approx_reverse_low_d(eps: float, d: float) -> float:
    """``eps + sqrt(2 eps (1 - eps) d)``, capped at 1."""
    eps = check_probability(eps)
    d = check_radius(d)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"needs 0 < eps < 1, got {eps}")
    return min(eps + math.sqrt(2.0 * eps * (1.0 - eps) * d), 1.0)


def reverse_worst_ratio(result: ReverseResult, eps: float) -> WorstCaseRatio:
    """``(lambda*/(mu - 1), lambda*/mu)`` read off the root certificate."""
    eps = check_probability(eps)
    if eps in (0.0, 1.0):
        raise DomainError("worst-case ratio is degenerate at eps in {0, 1}")
    if math.isinf(result.mu):
        return WorstCaseRatio(1.0, 1.0)
    t = result.mu_minus_one
    if math.isnan(t):
        t = result.mu - 1.0
    if t == 0.0:
        return WorstCaseRatio(1.0 / eps, 0.0)
    lam = result.lambda_star
    return WorstCaseRatio(lam / t, lam / (1.0 + t))
