"""Compare the compiled and numpy log-det kernels on one Monte Carlo block.

    python benchmarks/bench_logdet.py [--trials N] [--repeat K]
"""
import argparse
import math
import timeit

import numpy as np

from robust_outage import _kernels
from robust_outage.channel import BLOCK, MimoScenario, covariance_factor, sample_channels

SHAPES = [(1, 1), (2, 2), (4, 2), (4, 4), (8, 8)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=BLOCK)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    try:
        from robust_outage._logdet_ext import logdet_batch as compiled
    except ImportError:
        compiled = None
        print("compiled extension not built; timing the numpy kernel only")

    print(f"{'shape':>6} {'numpy us/trial':>15} {'compiled us/trial':>18} {'speedup':>8} {'max |diff|':>11}")
    for n_rx, n_tx in SHAPES:
        s = MimoScenario(n_tx, n_rx, 10.0, 1.0, trials=args.trials, seed=1)
        h = sample_channels(s, 0, args.trials)
        q = np.ascontiguousarray(covariance_factor(s.tx_covariance))
        t_np = min(timeit.repeat(lambda: _kernels.logdet_batch_numpy(h, q, s.snr),
                                 number=1, repeat=args.repeat)) / args.trials * 1e6
        if compiled is None:
            print(f"{n_rx}x{n_tx:<4} {t_np:15.3f} {'-':>18} {'-':>8} {'-':>11}")
            continue
        t_c = min(timeit.repeat(lambda: compiled(h, q, s.snr), number=1, repeat=args.repeat)) / args.trials * 1e6
        diff = float(np.max(np.abs(_kernels.logdet_batch_numpy(h, q, s.snr) - compiled(h, q, s.snr))))
        print(f"{n_rx}x{n_tx:<4} {t_np:15.3f} {t_c:18.3f} {t_np / t_c:8.2f} {diff:11.1e}")
    print(f"active backend: {_kernels.BACKEND}; trials per call {args.trials}"
          f" ({math.ceil(args.trials / BLOCK)} block(s))")


if __name__ == "__main__":
    main()
