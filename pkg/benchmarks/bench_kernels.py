"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--size N] [--repeat R]

Prints one CSV row per kernel: name, size, numpy seconds, numba seconds,
speedup, and the max abs difference between the two outputs.
"""

import argparse
import csv
import sys
import timeit

import numpy as np

from excursion.kernels import load_backend


def cases(size, rng):
    v = rng.uniform(1e-12, 1 - 1e-12, size)
    u = rng.uniform(0.01, 3.0, size)
    h = rng.uniform(1e-3, 5.0, size)
    y = rng.uniform(1e-3, 3.0, size)
    k = 34
    m = max(size // 64, 1)
    x = rng.uniform(0.1, 5.0, m)
    xi = rng.uniform(0.05, 1.0, (m, 2 * k + 2))
    gam = np.cumsum(rng.exponential(size=(m, k + 1)), axis=1)
    reps = max(size // 4096, 1)
    steps = rng.choice([-1.0, 1.0], (reps, 4096))
    return {
        "xi_cdf": lambda b: b.xi_cdf(u),
        "xi_pdf": lambda b: b.xi_pdf(u),
        "xi_quantile": lambda b: b.xi_quantile(v),
        "lambda_sum": lambda b: b.lambda_sum(x, xi, gam, True),
        "lindley": lambda b: b.lindley(steps),
        "excursions": lambda b: b.excursions(load_backend("numpy").lindley(steps)),
        "theta_series": lambda b: b.theta_series(h),
        "ustar_sf_scaled": lambda b: b.ustar_sf_scaled(y),
    }


def _flat(out):
    if isinstance(out, tuple):
        return np.concatenate([np.ravel(np.asarray(o, dtype=float)) for o in out])
    return np.ravel(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=200_000, help="elements per call (default: 2e5)")
    ap.add_argument("--repeat", type=int, default=5, help="timing repeats, best is kept (default: 5)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    nb = load_backend("numba")
    npb = load_backend("numpy")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["kernel", "size", "numpy_s", "numba_s", "speedup", "max_abs_diff"])
    for name, fn in cases(args.size, np.random.default_rng(args.seed)).items():
        ref = fn(npb)
        got = fn(nb)  # also triggers compilation
        diff = float(np.max(np.abs(_flat(ref) - _flat(got))))
        t_np = min(timeit.repeat(lambda: fn(npb), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: fn(nb), number=1, repeat=args.repeat))
        w.writerow([name, args.size, f"{t_np:.4g}", f"{t_nb:.4g}", f"{t_np / t_nb:.1f}", f"{diff:.2e}"])


if __name__ == "__main__":
    main()
