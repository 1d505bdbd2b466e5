#!/usr/bin/env python3
"""Benchmark the compiled coordinate-descent kernel against the pure-Python
fallback on experiment-sized Lasso problems.

Run from an installed tree:  python benchmarks/bench_cd.py
"""
from __future__ import annotations

import time

import numpy as np

from blockreg import _cd_py
from blockreg.designs import DesignSpec, SignalSpec, make_dataset
from blockreg.streams import stream

try:
    from blockreg import _cdcore
except ImportError:
    _cdcore = None


def prepare(n, p0, d, lam, seed):
    spec = DesignSpec("additive-trig", p0, d)
    beta0 = SignalSpec().draw(spec.p, n, seed)
    dataset = make_dataset(spec, n, beta0, 1.0, (seed, 0), stream(seed, 99))
    xt = np.ascontiguousarray(dataset.x.T)
    col_norms2 = np.einsum("ij,ij->i", xt, xt)
    threshold = lam * np.sqrt(n)
    return xt, dataset.y, col_norms2, threshold


def run(kernel, xt, y, col_norms2, threshold, tol=1e-10, max_sweeps=100_000):
    beta = np.zeros(xt.shape[0])
    r = y.astype(float, copy=True)
    start = time.perf_counter()
    sweeps, _ = kernel(xt, r, beta, col_norms2, threshold, tol, max_sweeps)
    return time.perf_counter() - start, sweeps, beta


def main():
    cases = [
        ("n=200 p=300 lam=0.05", 200, 30, 10, 0.05),
        ("n=200 p=300 lam=0.5", 200, 30, 10, 0.5),
        ("n=500 p=300 lam=0.5", 500, 30, 10, 0.5),
    ]
    for label, n, p0, d, lam in cases:
        xt, y, c2, thr = prepare(n, p0, d, lam, seed=7)
        t_py, sweeps_py, beta_py = run(_cd_py.cd_sweeps, xt, y, c2, thr)
        line = f"{label}: python {t_py*1e3:8.1f} ms ({sweeps_py} sweeps)"
        if _cdcore is not None:
            t_c, sweeps_c, beta_c = run(_cdcore.cd_sweeps, xt, y, c2, thr)
            gap = float(np.max(np.abs(beta_py - beta_c)))
            line += (f" | compiled {t_c*1e3:8.1f} ms ({sweeps_c} sweeps)"
                     f" | speedup {t_py/t_c:6.1f}x | max|dbeta| {gap:.2e}")
        else:
            line += " | compiled kernel not built"
        print(line)


if __name__ == "__main__":
    main()
