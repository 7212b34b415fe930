"""Time the numba kernels against the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

The numba column is "n/a" when numba is missing or disabled with
HEQUERY_DISABLE_NUMBA=1.
"""
import argparse
import time

import numpy as np

from hequery import _accel, kernels
from hequery.cyclotomic import cyclotomic_poly, primes_between, rabin_irreducible


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compile or cache load
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    f107 = cyclotomic_poly(107)
    primes = list(primes_between(2, 100))

    def sweep(use):
        return lambda: [rabin_irreducible(f107, p, use_numba=use) for p in primes]

    p = 97
    f = kernels.as_residues(f107.coeffs, p)
    rng = np.random.default_rng(0)
    a = rng.integers(0, p, 106, dtype=np.int64)
    b = rng.integers(0, p, 106, dtype=np.int64)

    def mulmod(use):
        ring = kernels.PolyModRing(f, p, use_numba=use)
        return lambda: [ring.mul(a, b) for _ in range(200)]

    big = kernels.MAX_PRIME - 5
    u = rng.integers(0, big, 300, dtype=np.int64)
    v = rng.integers(0, big, 299, dtype=np.int64)

    def res(use):
        fn = kernels._resultant_nb if use else kernels._resultant_np
        return lambda: fn(u, v, big)

    return [("rabin sweep Phi_107, p < 100", sweep),
            ("200 mulmod, degree 106", mulmod),
            ("resultant deg 299/298 mod ~2^26", res)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"backend: {_accel.backend_name()}")
    print(f"{'case':34s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, make in cases():
        t_np = best_of(make(False), args.repeat)
        if _accel.HAVE_NUMBA:
            t_nb = best_of(make(True), args.repeat)
            print(f"{name:34s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}")
        else:
            print(f"{name:34s} {t_np:10.4f} {'n/a':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
