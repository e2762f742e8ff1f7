"""Grid self-checks of the solvers against the brute-force oracles.

Each family returns a :class:`CheckResult`; ``perturb`` shifts every solver
output before comparison so the checker can be shown to catch errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import bernoulli_kl
from .forward_kl import forward_bounds, solve_forward
from .oracle import oracle_forward, oracle_reverse
from .reverse_kl import reverse_floor_bounds, solve_reverse, solve_reverse_dual

EPS_GRID = (0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.5, 0.9, 0.99, 1.0)
D_GRID = (0.0, 1e-6, 1e-3, 0.1, 1.0, 5.0)
ORACLE_TOL = 1e-8
SLACK_TOL = -1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" {self.detail}" if self.detail else ""
        return f"{status} {self.name} value={self.value:.3e} tol={self.tol:.1e}{extra}"


def _interior(eps: float, d: float) -> bool:
    return 0.0 < eps < 1.0 and d > 0.0


def _grid(eps_grid, d_grid):
    return [(e, d) for e in eps_grid for d in d_grid]


def check_oracle_forward(eps_grid=EPS_GRID, d_grid=D_GRID, perturb=0.0) -> CheckResult:
    err, where = 0.0, None
    for e, d in _grid(eps_grid, d_grid):
        gap = abs(solve_forward(e, d).p_out + perturb - oracle_forward(e, d).p_star)
        if gap > err:
            err, where = gap, (e, d)
    return CheckResult("oracle-forward", err <= ORACLE_TOL, err, ORACLE_TOL, f"worst={where}")


def check_oracle_reverse(eps_grid=EPS_GRID, d_grid=D_GRID, perturb=0.0) -> CheckResult:
    err, where = 0.0, None
    for e, d in _grid(eps_grid, d_grid):
        gap = abs(solve_reverse(e, d).p_out + perturb - oracle_reverse(e, d).p_star)
        if gap > err:
            err, where = gap, (e, d)
    return CheckResult("oracle-reverse", err <= ORACLE_TOL, err, ORACLE_TOL, f"worst={where}")


def check_reverse_dual(eps_grid=EPS_GRID, d_grid=D_GRID, perturb=0.0) -> CheckResult:
    err = 0.0
    for e, d in _grid(eps_grid, d_grid):
        if _interior(e, d):
            err = max(err, abs(solve_reverse(e, d).p_out + perturb - solve_reverse_dual(e, d)[0]))
    return CheckResult("reverse-dual-agreement", err <= ORACLE_TOL, err, ORACLE_TOL)


def check_forward_bounds(eps_grid=EPS_GRID, d_grid=D_GRID, perturb=0.0) -> CheckResult:
    slack = math.inf
    for e, d in _grid(eps_grid, d_grid):
        p = solve_forward(e, d).p_out + perturb
        lo, hi = forward_bounds(e, d)
        slack = min(slack, p - lo, hi - p)
    return CheckResult("forward-bounds", slack >= SLACK_TOL, slack, SLACK_TOL)


def check_reverse_floor(eps_grid=EPS_GRID, d_grid=D_GRID, perturb=0.0) -> CheckResult:
    slack = math.inf
    for e, d in _grid(eps_grid, d_grid):
        p = solve_reverse(e, d).p_out - perturb
        slack = min(slack, p - reverse_floor_bounds(e, d)[0])
    return CheckResult("reverse-floor", slack >= SLACK_TOL, slack, SLACK_TOL)


def check_kl_certificates(eps_grid=EPS_GRID, d_grid=D_GRID, perturb=0.0) -> CheckResult:
    err = 0.0
    for e, d in _grid(eps_grid, d_grid):
        if not _interior(e, d):
            continue
        pf = solve_forward(e, d).p_out + perturb
        if pf < 1.0:
            err = max(err, abs(bernoulli_kl(min(pf, 1.0), e) - d))
        pr = solve_reverse(e, d).p_out + perturb
        if pr < 1.0:
            err = max(err, abs(bernoulli_kl(e, min(pr, 1.0)) - d))
    return CheckResult("kl-certificate", err <= ORACLE_TOL, err, ORACLE_TOL)


def check_floor_equality(d_grid=D_GRID, perturb=0.0) -> CheckResult:
    err = 0.0
    for d in d_grid:
        err = max(err, abs(solve_reverse(0.0, d).p_out + perturb - (-math.expm1(-d))))
    return CheckResult("reverse-floor-equality", err == 0.0, err, 0.0)


FAMILIES = {
    "fwd-kl": (check_oracle_forward, check_forward_bounds),
    "rev-kl": (check_oracle_reverse, check_reverse_dual, check_reverse_floor),
}


def run_checks(kind: str = "all", eps_grid: Sequence[float] = EPS_GRID,
               d_grid: Sequence[float] = D_GRID, perturb: float = 0.0) -> list[CheckResult]:
    out: list[CheckResult] = []
    kinds: Iterable[str] = FAMILIES if kind == "all" else (kind,)
    for k in kinds:
        out.extend(f(eps_grid, d_grid, perturb) for f in FAMILIES[k])
    if kind == "all":
        out.append(check_kl_certificates(eps_grid, d_grid, perturb))
    if kind in ("all", "rev-kl") and 0.0 in eps_grid:
        out.append(check_floor_equality(d_grid, perturb))
    return out
