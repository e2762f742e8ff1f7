"""Compound outage under the forward KL ball ``D(f || f0) <= d``.

The worst case is found from the stationarity condition of the convex dual
``L(s) = s ln(1 + (e^{1/s} - 1) eps) + s d`` after the substitution
``y = eps (e^{1/s} - 1)``:

    d + ln(1 + y) = (y + eps) / (1 + y) * ln(1 + y / eps)

whose left-minus-right residual is monotone in ``y``.  The root is located in
``u = ln y`` so that neither ``e^{1/s}`` nor ``y`` ever has to be formed near
overflow; the compound outage is then ``(eps + y) / (1 + y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    DomainError,
    Regime,
    WorstCaseRatio,
    check_probability,
    check_radius,
    expand_bracket,
    find_root,
)

_REGIME_FACTOR = 100.0
_U_MIN = -745.0
_U_MAX = 709.0


@dataclass(frozen=True)
class ForwardResult:
    p_out: float
    s_star: float
    y_star: float
    approx_low_eps: float
    approx_low_d: float
    bounds: tuple[float, float]


def stationarity_residual(y: float, eps: float, d: float) -> float:
    """``((y + eps)/(1 + y)) ln(1 + y/eps) - ln(1 + y) - d``; increasing in ``y > 0``."""
    p = (y + eps) / (1.0 + y)
    return p * math.log1p(y / eps) - math.log1p(y) - d


def _s_from_y(y: float, eps: float) -> float:
    return 1.0 / math.log1p(y / eps)


def _solve_y(eps: float, d: float) -> float:
    def g(u):
        return stationarity_residual(math.exp(u), eps, d)

    u0 = math.log(eps) - 15.0 * math.log(10.0)
    lo, hi = expand_bracket(g, u0, max(u0 + 1.0, 0.0), step=4.0, limit_lo=_U_MIN, limit_hi=_U_MAX)
    # run to machine precision: the bracket costs a few dozen evaluations at most
    return math.exp(find_root(g, lo, hi, xtol_rel=0.0))


def solve_forward(eps: float, d: float) -> ForwardResult:
    """Worst-case outage over ``{f : D(f || f0) <= d}`` given nominal outage ``eps``.

    Endpoints are analytic: ``d = 0`` gives ``eps``; ``eps = 0`` gives 0;
    ``eps = 1`` or ``ln(1/eps) <= d`` gives 1 with ``s_star = 0``.
    """
    eps = check_probability(eps)
    d = check_radius(d)
    bounds = forward_bounds(eps, d)
    approx_u = _approx_u_or_nan(eps, d)
    approx_n = approx_nominal_dominated(eps, d)[0] if 0.0 < eps < 1.0 else eps

    if d == 0.0:
        return ForwardResult(eps, math.inf, 0.0, approx_u, approx_n, bounds)
    if eps == 0.0:
        return ForwardResult(0.0, 0.0, 0.0, approx_u, approx_n, bounds)
    if eps == 1.0 or -math.log(eps) <= d:
        return ForwardResult(1.0, 0.0, math.inf, approx_u, approx_n, bounds)

    y = _solve_y(eps, d)
    p = (eps + y) / (1.0 + y)
    p = min(max(p, eps), 1.0)
    return ForwardResult(p, _s_from_y(y, eps), y, approx_u, approx_n, bounds)


def forward_bounds(eps: float, d: float) -> tuple[float, float]:
    """Sandwich ``eps <= P <= min(d + (e - 1) eps, 1)``."""
    eps = check_probability(eps)
    d = check_radius(d)
    return eps, min(d + (math.e - 1.0) * eps, 1.0)


def approx_uncertainty_dominated(eps: float, d: float) -> tuple[float, float]:
    """Leading-order compound outage and dual minimizer when ``eps << d``.

    Returns ``(d / (L - ln L), 1 / (L - ln L))`` with ``L = ln(d / eps)``.
    """
    eps = check_probability(eps)
    d = check_radius(d)
    if not (0.0 < eps < d < 1.0):
        raise DomainError(f"needs 0 < eps < d < 1, got eps={eps}, d={d}")
    big_l = math.log(d / eps)
    if big_l <= 1.0:
        raise DomainError(f"ln(d/eps) = {big_l:.6g} <= 1; the nested logarithm is invalid")
    denom = big_l - math.log(big_l)
    p = d / denom
    return p, p / d


def _approx_u_or_nan(eps: float, d: float) -> float:
    try:
        return approx_uncertainty_dominated(eps, d)[0]
    except DomainError:
        return math.nan


def approx_nominal_dominated(eps: float, d: float) -> tuple[float, float]:
    """``(eps + sqrt(2 d eps (1 - eps)), sqrt(eps (1 - eps) / (2 d)))``, accurate for ``d << eps``.

    The probability is capped at 1.
    """
    eps = check_probability(eps)
    d = check_radius(d)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"needs 0 < eps < 1, got {eps}")
    var = eps * (1.0 - eps)
    p = min(eps + math.sqrt(2.0 * d * var), 1.0)
    s = math.inf if d == 0.0 else math.sqrt(var / (2.0 * d))
    return p, s


def forward_worst_ratio(result: ForwardResult, eps: float) -> WorstCaseRatio:
    """Density ratio of the worst-case law on the outage set and its complement."""
    eps = check_probability(eps)
    if eps in (0.0, 1.0):
        raise DomainError("worst-case ratio is degenerate at eps in {0, 1}")
    return WorstCaseRatio(result.p_out / eps, (1.0 - result.p_out) / (1.0 - eps))


def classify_regime(eps: float, d: float) -> Regime:
    eps = check_probability(eps)
    d = check_radius(d)
    if d == 0.0:
        return Regime.NOMINAL_DOMINATED
    if eps <= d / _REGIME_FACTOR:
        return Regime.UNCERTAINTY_DOMINATED
    if d <= eps / _REGIME_FACTOR:
        return Regime.NOMINAL_DOMINATED
    return Regime.TRANSITIONAL
