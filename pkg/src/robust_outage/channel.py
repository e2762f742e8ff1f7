"""Nominal outage probability for concrete channels.

Mutual information is the log-det ``ln det(I + snr H R_x H^H)`` (nats).  Channel
entries of the i.i.d. Rayleigh model are circular complex Gaussian with unit
variance (real and imaginary parts each of variance 1/2), noise is folded into
``snr``.

Monte Carlo draws come from numpy's counter-based Philox generator.  Trials are
cut into fixed blocks of ``BLOCK`` trials; block ``b`` uses key ``seed`` with
the top counter word set to ``b``, so every block owns a disjoint slice of the
counter space.  Results depend on ``(seed, trials)`` only, not on how blocks
are spread over worker threads.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import _kernels
from .core import DomainError

log = logging.getLogger(__name__)

BLOCK = 1 << 16
_PSD_TOL = 1e-12


@dataclass(frozen=True)
class IidRayleigh:
    pass


@dataclass(frozen=True)
class PointMass:
    """Deterministic channel: the nominal law puts all mass on ``h``."""

    h: np.ndarray


Fading = Union[IidRayleigh, PointMass]


@dataclass(frozen=True)
class MimoScenario:
    n_tx: int
    n_rx: int
    snr: float
    rate: float
    tx_covariance: np.ndarray = None
    fading: Fading = field(default_factory=IidRayleigh)
    trials: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise DomainError("antenna counts must be positive")
        if not self.snr > 0.0:
            raise DomainError(f"snr must be positive, got {self.snr!r}")
        if not self.rate >= 0.0:
            raise DomainError(f"rate must be nonnegative, got {self.rate!r}")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.tx_covariance is None:
            cov = np.eye(self.n_tx, dtype=complex) / self.n_tx
        else:
            cov = np.asarray(self.tx_covariance, dtype=complex)
        check_covariance(cov, self.n_tx)
        object.__setattr__(self, "tx_covariance", cov)
        if isinstance(self.fading, PointMass):
            h = np.asarray(self.fading.h, dtype=complex).reshape(self.n_rx, self.n_tx)
            object.__setattr__(self, "fading", PointMass(h))

    def with_covariance(self, cov) -> "MimoScenario":
        return MimoScenario(self.n_tx, self.n_rx, self.snr, self.rate, cov,
                            self.fading, self.trials, self.seed)

    def with_rate(self, rate: float) -> "MimoScenario":
        return MimoScenario(self.n_tx, self.n_rx, self.snr, rate, self.tx_covariance,
                            self.fading, self.trials, self.seed)


@dataclass(frozen=True)
class EpsEstimate:
    eps_hat: float
    std_err: float
    trials: int


def check_covariance(cov: np.ndarray, n_tx: int, power: float = 1.0) -> None:
    if cov.shape != (n_tx, n_tx):
        raise DomainError(f"covariance must be {n_tx}x{n_tx}, got {cov.shape}")
    if not np.allclose(cov, cov.conj().T, atol=_PSD_TOL, rtol=0.0):
        raise DomainError("covariance must be Hermitian")
    w = np.linalg.eigvalsh(cov)
    if w.min() < -_PSD_TOL * max(1.0, abs(w.max())):
        raise DomainError("covariance must be positive semidefinite")
    if np.trace(cov).real > power + _PSD_TOL:
        raise DomainError(f"covariance trace exceeds the power budget {power}")


def covariance_factor(cov: np.ndarray) -> np.ndarray:
    """``Q`` with ``Q Q^H = cov``; eigen-based so singular covariances are fine."""
    w, v = np.linalg.eigh(cov)
    return v * np.sqrt(np.clip(w, 0.0, None))


def mutual_information(h, snr: float, cov) -> float:
    """``ln det(I + snr H R_x H^H)`` in nats.

    Cholesky of the Hermitian positive-definite argument; on failure the sum of
    ``ln(1 + lambda_i)`` over the eigenvalues of ``snr H R_x H^H`` is used.
    """
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    cov = np.atleast_2d(np.asarray(cov, dtype=complex))
    if h.shape[1] != cov.shape[0]:
        raise DomainError(f"H is {h.shape}, covariance is {cov.shape}")
    check_covariance(cov, cov.shape[0], power=math.inf)
    gram = snr * (h @ cov @ h.conj().T)
    gram = 0.5 * (gram + gram.conj().T)
    try:
        chol = np.linalg.cholesky(np.eye(h.shape[0]) + gram)
    except np.linalg.LinAlgError:
        lam = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
        return float(np.log1p(lam).sum())
    return max(float(2.0 * np.log(np.diagonal(chol).real).sum()), 0.0)


def rayleigh_siso_eps(snr: float, rate: float) -> float:
    """``Pr{ln(1 + snr |h|^2) < R}`` for unit-mean exponential ``|h|^2``."""
    if not snr > 0.0 or not rate >= 0.0:
        raise DomainError("needs snr > 0 and rate >= 0")
    return -math.expm1(-math.expm1(rate) / snr)


def rayleigh_siso_capacity(snr: float, delta: float) -> float:
    """Closed-form nominal outage capacity ``ln(1 + snr (-ln(1 - delta)))``."""
    if not snr > 0.0 or not 0.0 <= delta < 1.0:
        raise DomainError("needs snr > 0 and 0 <= delta < 1")
    return math.log1p(-snr * math.log1p(-delta))


def block_generator(seed: int, block: int) -> np.random.Generator:
    key = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, block]))


def sample_channels(scenario: MimoScenario, block: int, n: int) -> np.ndarray:
    z = block_generator(scenario.seed, block).standard_normal((n, scenario.n_rx, scenario.n_tx, 2))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)


def _block_mi(scenario: MimoScenario, q: np.ndarray, block: int) -> np.ndarray:
    n = min(BLOCK, scenario.trials - block * BLOCK)
    h = sample_channels(scenario, block, n)
    mi = _kernels.logdet_batch(h, q, scenario.snr)
    bad = np.flatnonzero(~np.isfinite(mi))
    for k in bad:
        mi[k] = mutual_information(h[k], scenario.snr, scenario.tx_covariance)
    return mi


def sample_mutual_information(scenario: MimoScenario, workers: int = 1) -> np.ndarray:
    """Mutual information of every Monte Carlo trial, in trial order."""
    if isinstance(scenario.fading, PointMass):
        mi = mutual_information(scenario.fading.h, scenario.snr, scenario.tx_covariance)
        return np.full(scenario.trials, mi)
    log.info("monte carlo: seed=%d trials=%d blocks of %d", scenario.seed, scenario.trials, BLOCK)
    q = covariance_factor(scenario.tx_covariance)
    blocks = range(-(-scenario.trials // BLOCK))
    if workers <= 1:
        parts = [_block_mi(scenario, q, b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_mi(scenario, q, b), blocks))
    return np.concatenate(parts)


def _estimate(count: int, trials: int) -> EpsEstimate:
    p = count / trials
    return EpsEstimate(p, math.sqrt(p * (1.0 - p) / trials), trials)


def estimate_eps(scenario: MimoScenario, workers: int = 1) -> EpsEstimate:
    """Monte Carlo estimate of ``Pr{I < R}`` under the nominal law."""
    mi = sample_mutual_information(scenario, workers)
    return _estimate(int(np.count_nonzero(mi < scenario.rate)), scenario.trials)


def mc_eps_of_rate(scenario: MimoScenario, workers: int = 1) -> Callable[[float], float]:
    """``R -> eps_hat(R)`` on one fixed set of draws, so the map is monotone in ``R``."""
    mi = np.sort(sample_mutual_information(scenario, workers))
    trials = mi.size

    def eps_of_rate(rate: float) -> float:
        return int(np.searchsorted(mi, rate, side="left")) / trials

    return eps_of_rate


def grid_nominal_eps(base: MimoScenario, grid: Sequence[np.ndarray], workers: int = 1) -> list[float]:
    """Nominal outage estimate for each candidate covariance on common channel draws."""
    if len(grid) == 0:
        raise DomainError("covariance grid is empty")
    return [estimate_eps(base.with_covariance(cov), workers).eps_hat for cov in grid]


def minimize_eps_over_grid(base: MimoScenario, grid: Sequence[np.ndarray],
                           workers: int = 1) -> tuple[np.ndarray, float]:
    """Grid member with the smallest nominal outage, and that outage."""
    eps = grid_nominal_eps(base, grid, workers)
    best = int(np.argmin(eps))
    return np.asarray(grid[best], dtype=complex), eps[best]
