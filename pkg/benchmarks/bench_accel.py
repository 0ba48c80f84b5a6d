"""Time the numba kernels against their pure-numpy twins.

    python benchmarks/bench_accel.py [--n 2000000] [--repeat 5]

Each kernel is run once to trigger compilation, then timed ``--repeat``
times; the best time is reported together with the largest relative
difference between the two backends.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rieszlab import _accel


def cases(n: int, mu: np.ndarray) -> dict:
    return {
        "sieve_mobius": (n,),
        "riesz_direct_sum": (50.0, mu, n),
        "s_sum": (0.01, mu, min(n, 3000)),
        "s_prime_sum": (0.01, mu, min(n, 3000)),
        "kbar_sum": (0.01, mu, min(n, 3000)),
        "mu_weighted_sum": (2, mu, n),
        "cos_comp_sum": (1e3, mu, n, 1),
        "pz_comp_sum": (1e6, 0.0, 0.0, mu, n, 2),
    }


def best_of(fn, args, repeat: int) -> tuple[float, object]:
    out = fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def rel_diff(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2_000_000, help="series length / sieve limit")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    mu = _accel.NUMPY_KERNELS["sieve_mobius"](args.n)
    print(f"{'kernel':<18} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8} {'rel diff':>10}")
    for name, a in cases(args.n, mu).items():
        t_np, r_np = best_of(_accel.NUMPY_KERNELS[name], a, args.repeat)
        t_nb, r_nb = best_of(_accel.NUMBA_KERNELS[name], a, args.repeat)
        print(f"{name:<18} {t_np:11.4g} {t_nb:11.4g} {t_np / t_nb:8.2f} {rel_diff(r_nb, r_np):10.2e}")


if __name__ == "__main__":
    main()
