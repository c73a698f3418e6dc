"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_backends.py [--repeat 7]

Backend selection happens per call through HFPQUAD_BACKEND, so both paths
run in one process.  The numba path is called once before timing to absorb
jit compilation.
"""

import argparse
import math
import os
import time

import numpy as np

from hfpquad import _kernels
from hfpquad.ie_solver import _dirichlet_taylor
from hfpquad.oracles import GeometricKernelCase
from hfpquad.quadrature import RuleSpec, t_hat


def timeit(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, fn, repeat):
    results = {}
    for backend in ("numba", "numpy"):
        if backend == "numba" and _kernels.numba is None:
            continue
        os.environ["HFPQUAD_BACKEND"] = backend
        fn()  # warm (jit compile / cache touch)
        results[backend] = timeit(fn, repeat)
    line = f"{name:<38s}"
    for backend, t in results.items():
        line += f"  {backend}: {t * 1e3:9.3f} ms"
    if len(results) == 2:
        line += f"  speedup: {results['numpy'] / results['numba']:5.2f}x"
    print(line)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(0)

    n_big = 200_000
    g = rng.standard_normal(n_big)
    y = np.concatenate([np.arange(1, n_big // 2 + 1), -np.arange(1, n_big // 2 + 1)]) * 1e-4
    bench(
        f"singular_sum ({n_big} nodes, m=3)",
        lambda: _kernels.singular_sum(g, y, 3),
        args.repeat,
    )

    vals = rng.standard_normal(n_big)
    bench(f"kahan_sum ({n_big} values)", lambda: _kernels.kahan_sum(vals), args.repeat)

    taylor = np.array(_dirichlet_taylor(64))
    z = rng.uniform(-1.5, 1.5, 100_000)
    for order in (0, 3):
        bench(
            f"dirichlet_dz (100k angles, order {order})",
            lambda order=order: _kernels.dirichlet_dz(z, 64, order, taylor, 1e-4),
            args.repeat,
        )

    case = GeometricKernelCase(eta=0.5, t=1.0)
    integ = case.integrand()
    bench(
        "t_hat (m=3, s=2, n=2048, end to end)",
        lambda: t_hat(RuleSpec(3, 2, 2048, path="compact"), integ),
        args.repeat,
    )


if __name__ == "__main__":
    main()
