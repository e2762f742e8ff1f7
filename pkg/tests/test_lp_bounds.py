import math

import numpy as np
import pytest

from robust_outage.core import DomainError, UncertaintyClass
from robust_outage.lp_bounds import lp_lower_bounds, tv_exact_outage
from robust_outage.oracle import oracle_discrete


def test_chain_values():
    c = lp_lower_bounds(2.0, 0.2, 0.01)
    assert c.floor == pytest.approx(-math.expm1(-0.02), rel=1e-15)
    assert c.floor == pytest.approx(0.019801, abs=1e-6)
    assert c.p1_via_reverse == pytest.approx(0.0442700, abs=1e-6)
    assert c.p1_via_forward == pytest.approx(0.0356483, abs=1e-6)
    assert c.best == c.p1_via_reverse
    assert set(c.members()) == {"p1_via_forward", "p1_via_reverse", "floor_with_eps", "floor"}


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
@pytest.mark.parametrize("d", [0.0, 0.01, 0.2, 1.0, 2.0])
@pytest.mark.parametrize("eps", [0.0, 1e-4, 0.01, 0.3, 0.9, 1.0])
def test_chain_ordering(p, d, eps):
    c = lp_lower_bounds(p, d, eps)
    tol = 1e-12
    assert c.p1_via_reverse >= c.floor_with_eps - tol
    assert c.floor_with_eps >= c.floor - tol
    assert c.p1_via_forward >= eps - tol
    assert tv_exact_outage(d, eps) >= max(c.members().values()) - tol


def test_tv_exact():
    assert tv_exact_outage(0.2, 0.01) == pytest.approx(0.11)
    assert tv_exact_outage(3.0, 0.5) == 1.0
    assert tv_exact_outage(0.0, 0.3) == 0.3


def test_tv_exact_matches_discrete_optimum():
    rng = np.random.default_rng(9)
    for _ in range(5):
        probs = rng.dirichlet(np.ones(4))
        mask = np.array([True, False, True, False])
        d = float(rng.uniform(0.0, 0.8))
        got = oracle_discrete(probs, mask, UncertaintyClass.lp_ball(d, 1))
        assert got == pytest.approx(tv_exact_outage(d, float(probs[mask].sum())), abs=1e-6)


def test_rejects_bad_order():
    with pytest.raises(DomainError):
        lp_lower_bounds(0.5, 0.1, 0.1)
