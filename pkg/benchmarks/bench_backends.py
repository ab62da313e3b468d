"""Time one RK4 step of the SIR reaction-diffusion system, numpy vs numba.

    python benchmarks/bench_backends.py [--sizes 64 128 256] [--steps 50]
"""
import argparse
import time

import numpy as np

from sirrd import _kernels
from sirrd.kinetics import PAPER_PARAMS as P


def bench(step, n, steps, repeats=3):
    rng = np.random.default_rng(0)
    s, i, r = rng.random((3, n, n))
    h = 5.0 / n
    dt = 0.9 * h * h / 2.0
    args = (P.chi_s, P.chi_i, P.chi_r, P.b, P.beta, P.nu, P.gamma, h, dt)
    step(s, i, r, *args)  # warm-up / JIT
    best = float("inf")
    for _ in range(repeats):
        u = (s, i, r)
        t0 = time.perf_counter()
        for _ in range(steps):
            u = step(*u, *args)
        best = min(best, (time.perf_counter() - t0) / steps)
    return best, u


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--steps", type=int, default=50)
    args = ap.parse_args()

    print(f"{'nx':>6} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8} {'max |diff|':>11}")
    for n in args.sizes:
        t_np, u_np = bench(_kernels.rk4_step_np, n, args.steps)
        if _kernels.HAVE_NUMBA:
            t_nb, u_nb = bench(_kernels.rk4_step_nb, n, args.steps)
            diff = max(float(np.abs(a - b).max()) for a, b in zip(u_np, u_nb))
            print(f"{n:>6} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} {t_np / t_nb:>8.2f} {diff:>11.2e}")
        else:
            print(f"{n:>6} {1e3 * t_np:>12.3f} {'n/a':>12} {'':>8} {'':>11}")


if __name__ == "__main__":
    main()
