import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from robust_outage.core import DomainError, Regime, bernoulli_kl, safe_dual_objective
from robust_outage.forward_kl import (
    approx_nominal_dominated,
    approx_uncertainty_dominated,
    classify_regime,
    forward_bounds,
    forward_worst_ratio,
    solve_forward,
    stationarity_residual,
)

# 40-digit root of kl(p, eps) = d
REFERENCE = [
    (0.01, 0.1, 0.080514523843720992),
    (0.1, 1.0, 0.68921722654495822),
    (1e-4, 1e-3, 0.00081731396998250828),
    (0.5, 0.1, 0.71979462616140974),
    (1e-6, 5.0, 0.41092902675178503),
    (0.3, 1e-6, 0.30064820728147705),
]


@pytest.mark.parametrize("eps,d,expected", REFERENCE)
def test_matches_high_precision_reference(eps, d, expected):
    assert solve_forward(eps, d).p_out == pytest.approx(expected, rel=1e-12)


def test_endpoints():
    assert solve_forward(0.3, 0.0).p_out == 0.3
    assert solve_forward(0.3, 0.0).s_star == math.inf
    assert solve_forward(0.0, 0.5).p_out == 0.0
    assert solve_forward(1.0, 0.5).p_out == 1.0
    # whole mass fits in the outage set once ln(1/eps) <= d
    r = solve_forward(0.5, math.log(2.0))
    assert r.p_out == 1.0 and r.s_star == 0.0


def test_dual_certificate_attains_the_value():
    r = solve_forward(0.01, 0.1)
    assert safe_dual_objective(r.s_star, 0.01, 0.1) == pytest.approx(r.p_out, rel=1e-12)
    assert r.y_star == pytest.approx(0.01 * math.expm1(1.0 / r.s_star), rel=1e-12)
    assert stationarity_residual(r.y_star, 0.01, 0.1) == pytest.approx(0.0, abs=1e-12)


def test_dual_minimizer_is_a_minimum():
    r = solve_forward(0.05, 0.2)
    for f in (0.9, 0.99, 1.01, 1.1):
        assert safe_dual_objective(r.s_star * f, 0.05, 0.2) >= r.p_out - 1e-15


@given(st.floats(min_value=1e-8, max_value=0.999), st.floats(min_value=1e-8, max_value=10.0))
def test_certificate_and_sandwich(eps, d):
    r = solve_forward(eps, d)
    lo, hi = forward_bounds(eps, d)
    assert lo - 1e-12 <= r.p_out <= hi + 1e-12
    if r.p_out < 1.0:
        assert bernoulli_kl(r.p_out, eps) == pytest.approx(d, rel=1e-8, abs=1e-12)


def test_worst_ratio_values():
    ratio = forward_worst_ratio(solve_forward(0.01, 0.1), 0.01)
    assert ratio.r_outage == pytest.approx(8.0514523843720992, rel=1e-10)
    assert ratio.r_clear == pytest.approx(0.92877320823866572, rel=1e-10)
    assert ratio.mass(0.01) == pytest.approx(1.0, rel=1e-14)
    flat = forward_worst_ratio(solve_forward(0.3, 0.0), 0.3)
    assert (flat.r_outage, flat.r_clear) == (1.0, 1.0)
    with pytest.raises(DomainError):
        forward_worst_ratio(solve_forward(0.0, 0.1), 0.0)


def test_uncertainty_dominated_approximation_domain():
    p, s = approx_uncertainty_dominated(1e-7, 1e-3)
    big_l = math.log(1e-3 / 1e-7)
    assert p == pytest.approx(1e-3 / (big_l - math.log(big_l)))
    assert s == pytest.approx(p / 1e-3)
    with pytest.raises(DomainError):
        approx_uncertainty_dominated(0.01, 0.001)
    with pytest.raises(DomainError):
        approx_uncertainty_dominated(0.05, 0.1)  # ln(d/eps) < 1
    assert math.isnan(solve_forward(0.3, 0.1).approx_low_eps)


def test_nominal_dominated_approximation():
    p, s = approx_nominal_dominated(0.1, 1e-6)
    assert p == pytest.approx(0.1 + math.sqrt(2e-6 * 0.09))
    assert s == pytest.approx(math.sqrt(0.09 / 2e-6))
    assert approx_nominal_dominated(0.1, 0.0) == (0.1, math.inf)
    assert approx_nominal_dominated(0.5, 5.0)[0] == 1.0


def test_regimes():
    assert classify_regime(1e-6, 0.1) is Regime.UNCERTAINTY_DOMINATED
    assert classify_regime(0.1, 1e-6) is Regime.NOMINAL_DOMINATED
    assert classify_regime(0.1, 0.1) is Regime.TRANSITIONAL
    assert classify_regime(0.1, 0.0) is Regime.NOMINAL_DOMINATED


def test_domain_errors():
    with pytest.raises(DomainError):
        solve_forward(-0.1, 0.1)
    with pytest.raises(DomainError):
        solve_forward(0.1, -1.0)
