#!/usr/bin/env python3
"""Compare the numba and pure-numpy Jacobi backends on realistic stacks.

Workloads are the strip Hamiltonians and Floquet operators the package
actually diagonalizes. Run ``python3 benchmarks/bench_jacobi.py``; pass
``--quick`` for a smaller sweep.
"""
import argparse
import time

import numpy as np

from floqlat import _accel, kernels
from floqlat.floquet import ModelParams, floquet_strip_stack
from floqlat.staticlat import hs_strip


def workloads(quick):
    sizes = (6, 12) if quick else (6, 12, 24)
    ks = np.linspace(-np.pi, np.pi, 8 if quick else 32, endpoint=False)
    for N in sizes:
        p = ModelParams(1.5 * np.pi, n_minus=N)
        H = np.stack([hs_strip("x-minus", k, p) for k in ks])
        yield f"static strip N={N} ({len(ks)}x{H.shape[1]}^2)", H
        U = floquet_strip_stack(ks, p, "x-minus")
        yield f"floquet Re(U) N={N} ({len(ks)}x{U.shape[1]}^2)", 0.5 * (U + np.conj(np.swapaxes(U, 1, 2)))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"numba available: {_accel.NUMBA_AVAILABLE}  (requested: {_accel.NUMBA_REQUESTED})")
    if _accel.NUMBA_AVAILABLE:
        t0 = time.perf_counter()
        kernels.jacobi_numba(np.eye(2, dtype=complex)[None])
        print(f"numba warm-up / cache load: {time.perf_counter() - t0:.2f}s")
    print(f"{'workload':<40} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8} {'max|dlam|':>10}")
    for name, stack in workloads(args.quick):
        t_np, (v_np, _) = best_of(lambda: kernels.jacobi_numpy(stack), args.repeat)
        if _accel.NUMBA_AVAILABLE:
            t_nb, (v_nb, _) = best_of(lambda: kernels.jacobi_numba(stack), args.repeat)
            diff = np.max(np.abs(np.sort(v_np, axis=1) - np.sort(v_nb, axis=1)))
            print(f"{name:<40} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.2f} {diff:>10.1e}")
        else:
            print(f"{name:<40} {t_np:>10.4f} {'-':>10} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
