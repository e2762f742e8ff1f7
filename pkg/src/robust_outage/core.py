"""Shared types, Bernoulli divergence helpers and scalar numerics.

Every solver in the package works in nats and reduces the divergence-ball
problem to the outage mass of a two-set partition, so the pieces here are
small: a validated uncertainty class, result containers, the Bernoulli KL
divergence, an overflow-safe evaluation of the forward dual objective and a
pair of bracketed scalar routines (root finding and unimodal minimization).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

# Terminal tolerances shared by every scalar solve.
XTOL_REL = 1e-12
FTOL = 1e-12
MAX_ITER = 200

_TINY = 1e-300


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


class ConvergenceError(RuntimeError):
    """Raised when a scalar iteration exhausts its budget."""


class BracketError(RuntimeError):
    """Raised when a search interval does not contain the sought point."""


class ClassKind(enum.Enum):
    FORWARD_KL = "fwd-kl"
    REVERSE_KL = "rev-kl"
    LP_BALL = "lp"


class Regime(enum.Enum):
    UNCERTAINTY_DOMINATED = "uncertainty-dominated"
    NOMINAL_DOMINATED = "nominal-dominated"
    TRANSITIONAL = "transitional"


def check_probability(x: float, name: str = "eps") -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:  # also rejects NaN
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return x


def check_radius(d: float, name: str = "d") -> float:
    d = float(d)
    if not (0.0 <= d < math.inf):
        raise DomainError(f"{name} must be finite and nonnegative, got {d!r}")
    return d


@dataclass(frozen=True)
class NominalOutage:
    eps: float

    def __post_init__(self):
        check_probability(self.eps)


@dataclass(frozen=True)
class UncertaintyClass:
    """Divergence ball around the nominal fading law.

    ``d`` is in nats for the two KL kinds and in norm units for ``LP_BALL``;
    ``p`` is the norm order and is only meaningful for ``LP_BALL``.
    """

    kind: ClassKind
    d: float
    p: Optional[float] = None

    def __post_init__(self):
        check_radius(self.d)
        if self.kind is ClassKind.LP_BALL:
            if self.p is None or not (self.p >= 1.0):
                raise DomainError(f"Lp ball needs norm order p >= 1, got {self.p!r}")
        elif self.p is not None:
            raise DomainError("norm order p is only defined for the Lp ball")

    @classmethod
    def forward_kl(cls, d: float) -> "UncertaintyClass":
        return cls(ClassKind.FORWARD_KL, d)

    @classmethod
    def reverse_kl(cls, d: float) -> "UncertaintyClass":
        return cls(ClassKind.REVERSE_KL, d)

    @classmethod
    def lp_ball(cls, d: float, p: float) -> "UncertaintyClass":
        return cls(ClassKind.LP_BALL, d, float(p))


@dataclass(frozen=True)
class ForwardDual:
    """Dual certificate of the forward class: minimizer ``s_star`` and ``y_star = eps (e^{1/s} - 1)``."""

    s_star: float
    y_star: float


@dataclass(frozen=True)
class ReverseRoot:
    """Root certificate of the reverse class: normalization multiplier and divergence multiplier."""

    mu: float
    lambda_star: float


@dataclass(frozen=True)
class BoundOnly:
    pass


Certificate = Union[ForwardDual, ReverseRoot, BoundOnly]


@dataclass(frozen=True)
class CompoundSolution:
    p_out: float
    uclass: UncertaintyClass
    eps: float
    certificate: Certificate
    regime: Regime
    lower_bound: float
    upper_bound: float


@dataclass(frozen=True)
class WorstCaseRatio:
    """Piecewise-constant density ratio f*/f0 on the outage set and on its complement."""

    r_outage: float
    r_clear: float

    def mass(self, eps: float) -> float:
        """Total mass of the scaled density; equals one for a valid ratio."""
        return self.r_outage * eps + self.r_clear * (1.0 - eps)


def xlogy_ratio(a: float, b: float) -> float:
    # a ln(a/b) with 0 ln 0 = 0 and a ln(a/0) = inf for a > 0
    if a == 0.0:
        return 0.0
    if b == 0.0:
        return math.inf
    return a * math.log(a / b)


def bernoulli_kl(p: float, q: float) -> float:
    """KL divergence D(Bern(p) || Bern(q)) in nats.

    Uses ``0 ln 0 = 0``; returns ``inf`` when ``p`` puts mass where ``q`` does not.
    """
    p = check_probability(p, "p")
    q = check_probability(q, "q")
    if p == q:
        return 0.0
    return xlogy_ratio(p, q) + xlogy_ratio(1.0 - p, 1.0 - q)


def naive_dual_objective(s: float, eps: float, d: float) -> float:
    """Textbook form ``s ln(1 + (e^{1/s} - 1) eps) + s d``; overflows for small s."""
    return s * math.log(1.0 + (math.exp(1.0 / s) - 1.0) * eps) + s * d


def safe_dual_objective(s: float, eps: float, d: float) -> float:
    """Forward-class dual function L(s), evaluated without overflow.

    Branch point: once ``eps e^{1/s} >= 1 - eps`` (the exponential term
    dominates) the value is computed as
    ``1 + s ln(eps) + s log1p((1 - eps) e^{-1/s} / eps) + s d``; below it the
    direct form ``s log1p(expm1(1/s) eps) + s d`` is used.  Both are exact
    rewrites, so the switch introduces no jump.  ``s = inf`` returns the limit.
    """
    eps = check_probability(eps)
    d = check_radius(d)
    s = float(s)
    if not s > 0.0:
        raise DomainError(f"s must be positive, got {s!r}")
    if math.isinf(s):
        return eps if d == 0.0 else math.inf
    inv = 1.0 / s
    if eps == 0.0:
        return s * d
    if eps == 1.0:
        return 1.0 + s * d
    if inv + math.log(eps) >= math.log1p(-eps):
        tail = (1.0 - eps) * math.exp(-inv) / eps
        return 1.0 + s * math.log(eps) + s * math.log1p(tail) + s * d
    return s * math.log1p(math.expm1(inv) * eps) + s * d


def find_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    xtol_rel: float = XTOL_REL,
    xtol_abs: float = 1e-300,
    ftol: float = 0.0,
    max_iter: int = MAX_ITER,
) -> float:
    """Brent-Dekker root of ``f`` on a sign-change bracket ``[a, b]``.

    Terminates when the bracket half-width drops below
    ``2 * machine_eps * |x| + xtol_rel * |x| + xtol_abs`` or when
    ``|f(x)| <= ftol``.
    """
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(f"no sign change on [{a}, {b}]: f={fa}, {fb}")
    c, fc = a, fa
    e = dd = b - a
    for _ in range(max_iter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            e = dd = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * 2.2e-16 * abs(b) + 0.5 * (xtol_rel * abs(b) + xtol_abs)
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0 or abs(fb) <= ftol:
            return b
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol * q), abs(e * q)):
                e, dd = dd, p / q
            else:
                dd = m
                e = m
        else:
            dd = m
            e = m
        a, fa = b, fb
        b = b + dd if abs(dd) > tol else b + math.copysign(tol, m)
        fb = f(b)
    raise ConvergenceError(f"root not converged after {max_iter} iterations")


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    step: float = 2.0,
    limit_lo: float = -math.inf,
    limit_hi: float = math.inf,
    max_steps: int = 400,
) -> tuple[float, float]:
    """Widen ``[lo, hi]`` additively until an increasing ``f`` changes sign.

    Each failed step doubles the push.  Returns the bracket, clipped to the
    limits; the caller checks the signs at a clipped end.
    """
    width = step
    flo = f(lo)
    for _ in range(max_steps):
        if flo <= 0.0 or lo <= limit_lo:
            break
        hi = lo
        lo = max(lo - width, limit_lo)
        width *= 2.0
        flo = f(lo)
    width = step
    fhi = f(hi)
    for _ in range(max_steps):
        if fhi >= 0.0 or hi >= limit_hi:
            break
        lo = hi
        hi = min(hi + width, limit_hi)
        width *= 2.0
        fhi = f(hi)
    return lo, hi


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_minimize(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    xtol_rel: float = XTOL_REL,
    max_iter: int = MAX_ITER,
) -> tuple[float, float]:
    """Golden-section search for the minimizer of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x_min, f(x_min))``; stops once the interval is narrower than
    ``xtol_rel * max(1, |x|)``.
    """
    c = b - _INVPHI * (b - a)
    e = a + _INVPHI * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(max_iter):
        if abs(b - a) <= xtol_rel * max(1.0, abs(c)):
            break
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INVPHI * (b - a)
            fe = f(e)
    if fc <= fe:
        return c, fc
    return e, fe
