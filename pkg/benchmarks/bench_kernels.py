"""Time the compiled and numpy elimination kernels on product-complex boundary maps.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

from elempoly import _kernels
from elempoly.oracle import _boundary_array, product_complex, sphere_complex

CASES = [(1, 1), (2, 2), (2, 3), (3, 3), (2, 4)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels.nb is None:
        print("numba not importable; only the numpy kernel is timed")
    backends = ["numpy"] + (["numba"] if _kernels.nb is not None else [])
    # compile once outside the timings
    if "numba" in backends:
        _kernels.snf_diagonal(_boundary_array(sphere_complex(2), 1), "numba")
    print(f"{'complex':<10}{'deg':>4}{'shape':>14}" + "".join(f"{b:>12}" for b in backends))
    for p, q in CASES:
        c = product_complex(sphere_complex(p), sphere_complex(q))
        for i in range(1, c.dimension + 1):
            a = _boundary_array(c, i)
            row = f"S{p}xS{q}".ljust(10) + f"{i:>4}" + f"{str(a.shape):>14}"
            diags = []
            for b in backends:
                dt, d = best_of(lambda: _kernels.snf_diagonal(a, b), args.repeat)
                diags.append(d)
                row += f"{dt * 1e3:>10.1f}ms"
            # both kernels must agree on the invariant factors
            assert all(d == diags[0] for d in diags), f"backends disagree on S{p}xS{q} degree {i}"
            print(row)


if __name__ == "__main__":
    main()
