"""Command-line front end.

Exit codes: 0 success, 1 check failure, 2 usage or domain error, 3 Monte Carlo
runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Callable, Iterable, Optional, Sequence, TextIO

from . import checks
from .capacity import (
    CapacityQuery,
    capacity_floor,
    capacity_loss_bound,
    default_rate_max,
    outage_capacity,
)
from .channel import MimoScenario, estimate_eps, mc_eps_of_rate, rayleigh_siso_eps
from .compound import solve
from .core import (
    BracketError,
    ClassKind,
    ConvergenceError,
    DomainError,
    ForwardDual,
    ReverseRoot,
    UncertaintyClass,
    bernoulli_kl,
)
from .forward_kl import forward_worst_ratio, solve_forward
from .reverse_kl import reverse_worst_ratio, small_d_bound_valid, solve_reverse

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3
SEED_ENV = "ROBUST_OUTAGE_SEED"
CSV_HEADER = ("snr_db", "eps", "p_fwd", "p_rev", "fwd_approx_u", "fwd_approx_n", "rev_lower", "fwd_upper")

log = logging.getLogger("robust_outage")


class MonteCarloError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepRecord:
    """One SNR point of a sweep.

    ``fwd_approx_u`` is NaN where the uncertainty-dominated approximation is
    undefined (it needs ``eps < d`` and ``ln(d/eps) > 1``).
    """

    snr_db: float
    eps: float
    p_fwd: float
    p_rev: float
    fwd_approx_u: float
    fwd_approx_n: float
    rev_lower: float
    fwd_upper: float

    def __post_init__(self):
        for f in fields(self)[1:]:
            v = getattr(self, f.name)
            if not math.isnan(v) and not 0.0 <= v <= 1.0:
                raise DomainError(f"{f.name}={v!r} is not a probability")
        if not (self.eps <= self.p_fwd and self.rev_lower <= self.p_rev):
            raise DomainError(f"sweep record violates its ordering at snr_db={self.snr_db}")


def sweep_record(snr_db: float, eps: float, d: float) -> SweepRecord:
    fwd = solve_forward(eps, d)
    rev = solve_reverse(eps, d)
    return SweepRecord(snr_db, eps, fwd.p_out, rev.p_out, fwd.approx_low_eps,
                       fwd.approx_low_d, rev.bounds[0], fwd.bounds[1])


def write_sweep_csv(records: Iterable[SweepRecord], out: TextIO) -> None:
    out.write(",".join(CSV_HEADER) + "\n")
    for r in records:
        out.write(",".join("%.17g" % v for v in astuple(r)) + "\n")


def read_sweep_csv(src: TextIO) -> list[SweepRecord]:
    reader = csv.reader(src)
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise DomainError(f"unexpected header {header}")
    return [SweepRecord(*map(float, row)) for row in reader if row]


def gnuplot_script(csv_path: str) -> str:
    cols = {name: k + 1 for k, name in enumerate(CSV_HEADER)}
    plots = ", \\\n     ".join(
        f"'{csv_path}' using {cols['snr_db']}:{cols[name]} with lines title '{name}'"
        for name in CSV_HEADER[1:]
    )
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set logscale y\n"
        "set xlabel 'SNR [dB]'\n"
        "set ylabel 'outage probability'\n"
        f"plot {plots}\n"
    )


def parse_snr_range(text: str) -> list[float]:
    """``start:stop:step`` in dB, both ends included."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if not (step > 0.0 and stop >= start and math.isfinite(stop)):
        raise argparse.ArgumentTypeError(f"empty or unbounded SNR range {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(n)]


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _uclass(kind: str, d: float, p: Optional[float]) -> UncertaintyClass:
    if kind == "lp":
        if p is None:
            raise DomainError("--class lp needs --p")
        return UncertaintyClass.lp_ball(d, p)
    if p is not None:
        raise DomainError("--p only applies to --class lp")
    return UncertaintyClass(ClassKind(kind), d)


def _emit(out: TextIO, **items) -> None:
    for k, v in items.items():
        out.write(f"{k}={v:.17g}\n" if isinstance(v, float) else f"{k}={v}\n")


def _scenario(args, snr: float, rate: float) -> MimoScenario:
    return MimoScenario(args.n_tx, args.n_rx, snr, rate, trials=args.trials, seed=args.seed)


def _mc(fn: Callable, *a):
    try:
        return fn(*a)
    except (DomainError, BracketError):
        raise
    except Exception as exc:  # numerical or resource failures inside the sampler
        raise MonteCarloError(f"monte carlo failed: {exc}") from exc


# commands

def cmd_solve(args, out: TextIO) -> int:
    sol = solve(args.eps, _uclass(args.cls, args.d, args.p))
    _emit(out, p_out=sol.p_out, cls=sol.uclass.kind.value, eps=sol.eps, d=sol.uclass.d,
          regime=sol.regime.value)
    cert = sol.certificate
    if isinstance(cert, ForwardDual):
        _emit(out, s_star=cert.s_star, y_star=cert.y_star)
    elif isinstance(cert, ReverseRoot):
        _emit(out, mu=cert.mu, lambda_star=cert.lambda_star)
    else:
        _emit(out, certificate="bound-only")
    _emit(out, lower_bound=sol.lower_bound, upper_bound=sol.upper_bound)
    if sol.uclass.kind is ClassKind.FORWARD_KL:
        r = solve_forward(args.eps, args.d)
        _emit(out, approx_uncertainty=r.approx_low_eps, approx_nominal=r.approx_low_d)
    elif sol.uclass.kind is ClassKind.REVERSE_KL:
        r = solve_reverse(args.eps, args.d)
        _emit(out, approx_floor=r.approx_low_eps, approx_nominal=r.approx_low_d,
              small_d_lower=r.bounds[1] if small_d_bound_valid(args.d) else math.nan)
    return EXIT_OK


def _sweep_eps(args) -> Callable[[float], float]:
    if args.eps_model == "inverse-snr":
        return lambda db: min(1.0, 10.0 ** (-db / 10.0))
    if args.eps_model == "siso-rayleigh":
        return lambda db: rayleigh_siso_eps(10.0 ** (db / 10.0), args.rate)
    log.info("mc-mimo sweep: seed=%d trials=%d", args.seed, args.trials)
    return lambda db: _mc(estimate_eps, _scenario(args, 10.0 ** (db / 10.0), args.rate)).eps_hat


def cmd_sweep(args, out: TextIO) -> int:
    if args.gnuplot and not args.output:
        raise DomainError("--gnuplot needs --output so the script can name the CSV file")
    eps_of = _sweep_eps(args)

    def row(db):
        return sweep_record(db, eps_of(db), args.d)

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(row, args.snr_db))  # map preserves SNR order
    else:
        records = [row(db) for db in args.snr_db]
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_sweep_csv(records, fh)
        if args.gnuplot:
            with open(args.gnuplot, "w") as fh:
                fh.write(gnuplot_script(args.output))
    else:
        write_sweep_csv(records, out)
    return EXIT_OK


def cmd_capacity(args, out: TextIO) -> int:
    snr = 10.0 ** (args.snr_db / 10.0)
    if args.cls == "nominal":
        if args.d != 0.0:
            raise DomainError("--class nominal takes no radius; drop --d or use a KL class")
        uclass = None
    else:
        uclass = UncertaintyClass(ClassKind(args.cls), args.d)

    if args.eps_model == "siso-rayleigh":
        eps_of_rate = lambda r: rayleigh_siso_eps(snr, r)
        r_max = default_rate_max(snr)
    else:
        log.info("mc-mimo capacity: seed=%d trials=%d", args.seed, args.trials)
        eps_of_rate = _mc(mc_eps_of_rate, _scenario(args, snr, 0.0), args.workers)
        r_max = default_rate_max(snr, min(args.n_tx, args.n_rx))
    if args.rate_max is not None:
        r_max = args.rate_max

    if uclass is not None and uclass.kind is ClassKind.REVERSE_KL and args.delta < capacity_floor(args.d):
        floor = capacity_floor(args.d)
        msg = (f"delta={args.delta:g} is below the reverse-class floor 1-exp(-d)={floor:.9g}; "
               "no positive rate meets the target")
        if args.strict:
            raise DomainError(msg)
        _emit(out, capacity_nats=0.0, capacity_bits=0.0)
        out.write(f"notice: {msg}\n")
        return EXIT_OK

    query = CapacityQuery(args.delta, uclass, eps_of_rate, (0.0, r_max))
    try:
        c = outage_capacity(query)
    except BracketError as exc:
        raise BracketError(f"rate bracket [0, {r_max:.9g}] nats: {exc}") from None
    _emit(out, capacity_nats=c, capacity_bits=c / math.log(2.0))
    if (uclass is not None and uclass.kind is ClassKind.REVERSE_KL
            and small_d_bound_valid(args.d) and args.delta > args.d):
        nominal = lambda delta: outage_capacity(CapacityQuery(delta, None, eps_of_rate, (0.0, r_max)))
        _emit(out, loss_upper_bound_nats=capacity_loss_bound(args.delta, args.d, nominal))
    return EXIT_OK


def cmd_worst_case(args, out: TextIO) -> int:
    uclass = _uclass(args.cls, args.d, None)
    eps, d = args.eps, args.d
    if uclass.kind is ClassKind.FORWARD_KL:
        r = solve_forward(eps, d)
        ratio = forward_worst_ratio(r, eps)
        divergence = bernoulli_kl(r.p_out, eps)
        label = "D(f*||f0)"
    else:
        r = solve_reverse(eps, d)
        ratio = reverse_worst_ratio(r, eps)
        divergence = bernoulli_kl(eps, r.p_out)
        label = "D(f0||f*)"
    _emit(out, p_out=r.p_out, ratio_outage=ratio.r_outage, ratio_clear=ratio.r_clear,
          mass=ratio.mass(eps), divergence=divergence, radius=d)
    out.write(f"certificate: {label}={divergence:.17g} (radius {d:.17g})\n")
    return EXIT_OK


def cmd_check(args, out: TextIO) -> int:
    results = checks.run_checks(args.cls, args.eps or checks.EPS_GRID, args.d or checks.D_GRID,
                                args.perturb)
    for r in results:
        out.write(r.line() + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


# parser

def _add_mc_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("monte carlo (mc-mimo)")
    g.add_argument("--n-tx", type=int, default=2)
    g.add_argument("--n-rx", type=int, default=2)
    g.add_argument("--trials", type=int, default=100_000)
    g.add_argument("--seed", type=int, default=None,
                   help=f"defaults to ${SEED_ENV} or 0")
    g.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-outage",
                                     description="Compound outage probability and capacity under fading uncertainty.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="worst-case outage at one point")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--class", dest="cls", choices=("fwd-kl", "rev-kl", "lp"), required=True)
    p.add_argument("--p", type=float, default=None, help="norm order for --class lp")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="CSV sweep over SNR")
    p.add_argument("--eps-model", choices=("inverse-snr", "siso-rayleigh", "mc-mimo"), required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--snr-db", type=parse_snr_range, default=parse_snr_range("0:120:1"),
                   help="start:stop:step in dB, inclusive (default 0:120:1)")
    p.add_argument("--rate", type=float, default=1.0, help="target rate in nats (channel models)")
    p.add_argument("--output", default=None)
    p.add_argument("--gnuplot", default=None, metavar="SCRIPT")
    _add_mc_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("capacity", help="(compound) outage capacity")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--class", dest="cls", choices=("nominal", "fwd-kl", "rev-kl"), required=True)
    p.add_argument("--eps-model", choices=("siso-rayleigh", "mc-mimo"), default="siso-rayleigh")
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--rate-max", type=float, default=None, help="top of the rate search in nats")
    p.add_argument("--strict", action="store_true", help="exit 2 when delta is below the reverse floor")
    _add_mc_options(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("worst-case", help="worst-case density ratio and divergence certificate")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--class", dest="cls", choices=("fwd-kl", "rev-kl"), required=True)
    p.set_defaults(func=cmd_worst_case)

    p = sub.add_parser("check", help="oracle and bound invariants over a grid")
    p.add_argument("--class", dest="cls", choices=("all", "fwd-kl", "rev-kl"), default="all")
    p.add_argument("--eps", type=_float_list, default=None, help="comma-separated eps grid")
    p.add_argument("--d", type=_float_list, default=None, help="comma-separated d grid")
    p.add_argument("--perturb", type=float, default=0.0, help="shift solver outputs to test the checker")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose or hasattr(args, "trials") else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        return args.func(args, out)
    except (MonteCarloError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (DomainError, BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
