"""Backend selection for the Monte Carlo log-det kernel.

The compiled extension is used when it was built; otherwise, or when
``ROBUST_OUTAGE_PURE_PYTHON=1`` is set, a batched numpy implementation is used.
Both return NaN for trials whose Cholesky fails; the caller retries those.
"""
from __future__ import annotations

import os

import numpy as np


def logdet_batch_numpy(h: np.ndarray, q: np.ndarray, snr: float) -> np.ndarray:
    """ln det(I + snr H_k Q Q^H H_k^H) for a (trials, n_rx, n_tx) stack, via batched Cholesky."""
    a = h @ q
    n_rx, r = a.shape[1], a.shape[2]
    if n_rx <= r:
        g = a @ np.conj(np.swapaxes(a, 1, 2))
    else:
        g = np.conj(np.swapaxes(a, 1, 2)) @ a
    g *= snr
    idx = np.arange(g.shape[1])
    g[:, idx, idx] += 1.0
    out = np.full(g.shape[0], np.nan)
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        # one bad trial spoils the batch: fall back trial by trial
        for k in range(g.shape[0]):
            try:
                c = np.linalg.cholesky(g[k])
            except np.linalg.LinAlgError:
                continue
            out[k] = 2.0 * np.log(np.diagonal(c).real).sum()
        return out
    return 2.0 * np.log(np.diagonal(chol, axis1=1, axis2=2).real).sum(axis=1)


def _load():
    if os.environ.get("ROBUST_OUTAGE_PURE_PYTHON") == "1":
        return logdet_batch_numpy, "python"
    try:
        from ._logdet_ext import logdet_batch as compiled
    except ImportError:
        return logdet_batch_numpy, "python"

    def logdet_batch_compiled(h, q, snr):
        return compiled(np.ascontiguousarray(h, dtype=np.complex128),
                        np.ascontiguousarray(q, dtype=np.complex128), float(snr))

    return logdet_batch_compiled, "compiled"


logdet_batch, BACKEND = _load()
