#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs the two hot paths -- B-spline design evaluation and the banded
smoothing-spline machinery (factorize / solve / inverse bands) -- under
both backends and prints a timing table, plus one end-to-end additive
logistic fit per backend.

The numpy numbers here are what you get with GAMROC_NUMBA=0.
"""

import time

import numpy as np

from gamroc import _kernels_numba as kn
from gamroc import _kernels_numpy as kp
from gamroc.spline_basis import build_basis


def time_call(fn, *args, repeat=5, inner=1):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_design(n=20000, K=10, m=4):
    rng = np.random.default_rng(0)
    u = np.clip(rng.uniform(-1.1, 1.1, n), -1.0, 1.0)
    knots = build_basis(-1.0, 1.0, K=K, m=m).knot_vector.knots
    kn.bspline_design(u, knots, m, K)  # JIT warm-up
    t_nb = time_call(kn.bspline_design, u, knots, m, K)
    t_np = time_call(kp.bspline_design, u, knots, m, K)
    err = np.abs(kn.bspline_design(u, knots, m, K) - kp.bspline_design(u, knots, m, K)).max()
    return t_nb, t_np, err


def _penta_problem(n, rng):
    b0 = rng.uniform(3.0, 4.0, n)
    b1 = rng.uniform(0.1, 0.4, n - 1)
    b2 = rng.uniform(0.02, 0.1, n - 2)
    return b0, b1, b2


def bench_penta(n=2000):
    rng = np.random.default_rng(1)
    b0, b1, b2 = _penta_problem(n, rng)
    rhs = rng.normal(size=n)

    def pipeline(k):
        d, l1, l2 = k.penta_ldl(b0, b1, b2)
        k.penta_solve(d, l1, l2, rhs)
        k.penta_inv_bands(d, l1, l2)

    pipeline(kn)  # warm-up
    t_nb = time_call(lambda: pipeline(kn), repeat=5, inner=20)
    t_np = time_call(lambda: pipeline(kp), repeat=5, inner=20)
    dn = kn.penta_ldl(b0, b1, b2)
    dp = kp.penta_ldl(b0, b1, b2)
    err = max(np.abs(a - b).max() for a, b in zip(dn, dp))
    return t_nb, t_np, err


def bench_fit(n=400, d=5):
    # whole-fit comparison: same data, kernels swapped via module attribute
    import gamroc.smoothing as smoothing
    from gamroc.gam_backfit import local_scoring
    from gamroc.simgen import GeneratorSpec, gen_dataset

    data = gen_dataset(GeneratorSpec(1, d, n, 12345))
    out = {}
    original = smoothing.kernels
    try:
        for label, mod in (("numba", kn), ("numpy", kp)):
            smoothing.kernels = mod
            local_scoring(data.X, data.y, compute_se=False)  # warm-up
            t0 = time.perf_counter()
            local_scoring(data.X, data.y, compute_se=False)
            out[label] = time.perf_counter() - t0
    finally:
        smoothing.kernels = original
    return out


def main():
    print(f"{'kernel':<28}{'numba':>12}{'numpy':>12}{'speedup':>10}{'max err':>12}")
    t_nb, t_np, err = bench_design()
    print(f"{'bspline_design (n=20000)':<28}{t_nb * 1e3:>10.2f}ms{t_np * 1e3:>10.2f}ms"
          f"{t_np / t_nb:>9.1f}x{err:>12.1e}")
    t_nb, t_np, err = bench_penta()
    print(f"{'penta ldl+solve+inv (2000)':<28}{t_nb * 1e3:>10.2f}ms{t_np * 1e3:>10.2f}ms"
          f"{t_np / t_nb:>9.1f}x{err:>12.1e}")
    fit = bench_fit()
    print(f"{'local_scoring (n=400,d=5)':<28}{fit['numba'] * 1e3:>10.2f}ms"
          f"{fit['numpy'] * 1e3:>10.2f}ms{fit['numpy'] / fit['numba']:>9.1f}x{'':>12}")


if __name__ == "__main__":
    main()
