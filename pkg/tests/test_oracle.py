import math

import numpy as np
import pytest

from robust_outage.core import DomainError, UncertaintyClass
from robust_outage.oracle import (
    BISECTION_DEPTH,
    oracle_discrete,
    oracle_forward,
    oracle_reverse,
    oracle_scalar,
)


def test_bisection_values():
    r = oracle_forward(0.01, 0.1)
    assert r.p_star == pytest.approx(0.080514523843720992, abs=1e-15)
    assert r.iterations == BISECTION_DEPTH
    assert r.residual < 1e-12
    assert oracle_reverse(0.01, 0.1).p_star == pytest.approx(0.12785628771317317, abs=1e-15)


def test_oracle_endpoints():
    assert oracle_forward(0.4, 0.0).p_star == 0.4
    assert oracle_forward(0.5, 1.0).p_star == 1.0
    assert oracle_reverse(0.0, 0.1).p_star == -math.expm1(-0.1)
    assert oracle_reverse(1.0, 0.1).p_star == 1.0


def test_scalar_dispatch():
    assert oracle_scalar(0.01, UncertaintyClass.lp_ball(0.2, 1)) == pytest.approx(0.11)
    with pytest.raises(DomainError):
        oracle_scalar(0.01, UncertaintyClass.lp_ball(0.2, 2))


def test_split_complement_keeps_the_optimum():
    probs = np.array([0.01, 0.39, 0.6])
    mask = np.array([True, False, False])
    p = oracle_discrete(probs, mask, UncertaintyClass.forward_kl(0.1))
    assert p == pytest.approx(oracle_forward(0.01, 0.1).p_star, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("kind", ["fwd", "rev", "l1"])
def test_random_supports_match_scalar_oracle(seed, kind):
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(5))
    mask = np.zeros(5, bool)
    mask[: rng.integers(1, 5)] = True
    d = float(rng.uniform(0.01, 1.0))
    uclass = {"fwd": UncertaintyClass.forward_kl, "rev": UncertaintyClass.reverse_kl,
              "l1": lambda r: UncertaintyClass.lp_ball(r, 1)}[kind](d)
    eps = float(probs[mask].sum())
    assert oracle_discrete(probs, mask, uclass) == pytest.approx(oracle_scalar(eps, uclass), abs=1e-6)


def test_discrete_trivial_masks():
    probs = np.array([0.2, 0.8])
    u = UncertaintyClass.forward_kl(0.5)
    assert oracle_discrete(probs, np.array([False, False]), u) == 0.0
    assert oracle_discrete(probs, np.array([True, True]), u) == 1.0


def test_discrete_input_validation():
    with pytest.raises(DomainError):
        oracle_discrete([0.5, 0.6], [True, False], UncertaintyClass.forward_kl(0.1))
    with pytest.raises(DomainError):
        oracle_discrete([0.5, 0.5], [True], UncertaintyClass.forward_kl(0.1))
    with pytest.raises(DomainError):
        oracle_discrete([0.5, 0.5], [True, False], UncertaintyClass.lp_ball(0.1, 2))
