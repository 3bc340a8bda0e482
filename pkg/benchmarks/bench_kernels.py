#!/usr/bin/env python3
"""Benchmark the compiled descent kernel against the pure-python twin.

Times the raw descent loop (the hot path of scans and multistart sweeps)
and a full solve including the Newton polish and certification, for a batch
of mass vectors, and checks that both backends land on the same endpoint.

Usage: python benchmarks/bench_kernels.py [--n-masses 40] [--repeats 3]
"""

import argparse
import math
import time

import numpy as np

from ccc4 import kernels
from ccc4.chart import sample_interior
from ccc4.geometry import MassVector
from ccc4.solver import SolverOptions, minimize_U


def u_coeffs(m: MassVector) -> np.ndarray:
    return m.products() ** 1.5 / math.sqrt(2.0 * m.M)


def bench_descend(backend, cases, repeats):
    kernels.use_backend(backend)
    best = math.inf
    iters = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        iters = 0
        for vw, u in cases:
            out = kernels.descend(vw.v, vw.w, u, 1e-9, 500)
            iters += out[4]
        best = min(best, time.perf_counter() - t0)
    return best, iters


def bench_solve(backend, masses, repeats):
    kernels.use_backend(backend)
    opts = SolverOptions(starts=4, seed=0)
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for m in masses:
            minimize_U(m, opts)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-masses", type=int, default=40)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    masses = [MassVector.from_iterable(np.exp(rng.uniform(np.log(0.3), np.log(3.0), 4)))
              for _ in range(args.n_masses)]
    cases = [(sample_interior(i), u_coeffs(m)) for i, m in enumerate(masses)]

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; benchmarking the python backend only")

    # endpoint agreement across backends
    if len(backends) == 2:
        vw, u = cases[0]
        kernels.use_backend("compiled")
        out_c = kernels.descend(vw.v, vw.w, u, 1e-9, 500)
        kernels.use_backend("python")
        out_p = kernels.descend(vw.v, vw.w, u, 1e-9, 500)
        gap = max(abs(a - b) for a, b in zip(out_c[0] + out_c[1], out_p[0] + out_p[1]))
        print(f"backend endpoint agreement: {gap:.3e}\n")

    results = {}
    print(f"{'backend':<10} {'descent total':>14} {'per iteration':>14} "
          f"{'full solves':>12}")
    for backend in backends:
        t_desc, iters = bench_descend(backend, cases, args.repeats)
        t_solve = bench_solve(backend, masses, args.repeats)
        results[backend] = (t_desc, t_solve)
        print(f"{backend:<10} {t_desc * 1e3:>11.2f} ms {t_desc / iters * 1e6:>11.2f} us "
              f"{t_solve * 1e3:>9.1f} ms")

    if len(results) == 2:
        c, p = results["compiled"], results["python"]
        print(f"\nspeedup (descent loop): {p[0] / c[0]:.1f}x")
        print(f"speedup (full solve):   {p[1] / c[1]:.1f}x")


if __name__ == "__main__":
    main()
