#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the NumPy fallback.

Runs each kernel on scan-realistic shapes plus one end-to-end density scan,
printing per-case timings and speedups.

Usage: python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import importlib.util
import math
import time

import numpy as np

from zetarec.kernels import pure

_HAS_COMPILED = importlib.util.find_spec("zetarec.kernels._core") is not None
if _HAS_COMPILED:
    from zetarec.kernels import _core


def _time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases():
    rng = np.random.default_rng(1)

    # dirichlet_sums: (series length, batch) pairs seen in scans
    for m, nt in ((500, 4096), (4000, 1024), (40000, 256)):
        coef = np.arange(1, m + 1, dtype=np.float64) ** -1.5
        logn = np.log(np.arange(1, m + 1, dtype=np.float64))
        ts = rng.uniform(0, 2e5, nt)
        yield (f"dirichlet_sums m={m} batch={nt}",
               lambda impl, c=coef, l=logn, t=ts: impl.dirichlet_sums(c, l, t))

    # torus_product_diff: witness-style grids
    for nodes, R in ((36, 1000), (144, 1000)):
        theta = rng.uniform(0, 2 * math.pi, R)
        logp = np.log(np.arange(2, R + 2, dtype=np.float64))
        s = 1.8 + rng.uniform(0, 0.5, nodes) * 1j
        base = np.ascontiguousarray(np.exp(-s[:, None] * logp[None, :]))
        yield (f"torus_product_diff nodes={nodes} R={R}",
               lambda impl, th=theta, b=base: impl.torus_product_diff(th, 1, 2, b))

    # kron_mask: window scans
    taus = np.arange(644_000, dtype=np.float64) * 0.155
    freqs = np.log(np.array([2.0, 3.0, 5.0]))
    deltas = np.full(3, 0.5)
    yield ("kron_mask 644k x 3",
           lambda impl, t=taus, f=freqs, d=deltas: impl.kron_mask(t, f, d))


def bench_kernels(repeat):
    rows = []
    for name, call in _cases():
        t_pure = _time(lambda: call(pure), repeat)
        if _HAS_COMPILED:
            t_core = _time(lambda: call(_core), repeat)
            rows.append((name, t_core, t_pure, t_pure / t_core))
        else:
            rows.append((name, float("nan"), t_pure, float("nan")))
    return rows


def bench_end_to_end():
    """One small density scan per backend via subprocesses (import-time choice)."""
    import os
    import subprocess
    import sys

    code = """
import time
from zetarec.scanner import RecurrenceTarget, ScanConfig, nu_T
from zetarec.zetaeval import CompactRect, EvalConfig
import zetarec.kernels as k
rect = CompactRect(1.5, 1.6, 0.0, 0.2, grid_sigma=5, grid_t=5, region="absolute")
cfg = ScanConfig(target=RecurrenceTarget.rational(1, 2), rect=rect, eps=0.5,
                 T=2e3, tau_samples=2000, seed=7,
                 eval=EvalConfig(target_abs_error=1e-7))
t0 = time.perf_counter()
est = nu_T(cfg)
print(f"{k.BACKEND} {time.perf_counter()-t0:.3f} {est.value:.4f}")
"""
    out = {}
    backends = ("compiled", "python") if _HAS_COMPILED else ("python",)
    for backend in backends:
        env = dict(os.environ, ZETAREC_KERNELS=backend)
        res = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        name, secs, value = res.stdout.split()
        out[name] = (float(secs), value)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not _HAS_COMPILED:
        print("compiled extension not available; timing the fallback only\n")
    header = f"{'case':44s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, t_core, t_pure, speed in bench_kernels(args.repeat):
        core_s = f"{t_core*1e3:8.2f}ms" if _HAS_COMPILED else "       --"
        speed_s = f"{speed:7.1f}x" if _HAS_COMPILED else "     --"
        print(f"{name:44s} {core_s:>10s} {t_pure*1e3:8.2f}ms {speed_s:>8s}")

    print("\nend-to-end density scan (2000 samples, T=2e3):")
    for backend, (secs, value) in bench_end_to_end().items():
        print(f"  {backend:9s} {secs:7.3f}s  (density {value})")


if __name__ == "__main__":
    main()
