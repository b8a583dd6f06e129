"""Compare the compiled and pure-Python reduced-form kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import time
from math import isqrt

from z2tower import _kernels_py

try:
    from z2tower import _kernels
except ImportError:  # extension not built
    _kernels = None

# discriminants met when verifying scanned triples, plus a few larger ones
CASES = [5289, 42312, 137 * 33, 8 * 137 * 33, 457 * 67 * 83, 8 * 457 * 67 * 83, 10**7 + 1, 4 * (10**7 + 3)]


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def one_case(mod, D):
    forms = mod.reduced_forms(D)
    mod.cycle_labels(D, forms)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
    print(f"{'D':>12} {'forms':>7} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for D in CASES:
        if isqrt(D) ** 2 == D:
            continue
        nforms = len(_kernels_py.reduced_forms(D))
        tp = best_time(lambda: one_case(_kernels_py, D), args.repeat)
        if _kernels is not None:
            assert _kernels.reduced_forms(D) == _kernels_py.reduced_forms(D)
            tc = best_time(lambda: one_case(_kernels, D), args.repeat)
            print(f"{D:>12} {nforms:>7} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x")
        else:
            print(f"{D:>12} {nforms:>7} {tp:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
