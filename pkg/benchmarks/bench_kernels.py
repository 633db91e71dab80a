#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

The same comparison can be forced package-wide at runtime by setting
PRIVCPD_NO_NUMBA=1, which flips the public kernel entry points to the
numpy implementations.
"""

import argparse
import time

import numpy as np

from privcpd import _kernels


def best_of(fn, arg, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(arg)
        times.append(time.perf_counter() - t0)
    return min(times)


def run(repeats: int) -> None:
    if not _kernels.HAS_NUMBA:
        print("numba unavailable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<14} {'size':<16} {'numba':>10} {'numpy':>10} {'speedup':>8}")

    for n in (10_000, 100_000, 1_000_000):
        ratios = rng.normal(0.0, 1.4, size=n)
        _kernels._suffix_sums_jit(ratios)  # compile outside the timed region
        jit = best_of(_kernels._suffix_sums_jit, ratios, repeats)
        ref = best_of(_kernels._suffix_sums_np, ratios, repeats)
        print(f"{'suffix_sums':<14} {f'n={n}':<16} {jit * 1e3:>8.2f}ms {ref * 1e3:>8.2f}ms {ref / jit:>7.1f}x")

    for shape in ((1_000, 700), (10_000, 700), (10_000, 5_000)):
        rows = rng.normal(-0.8, 1.1, size=shape)
        _kernels._cusum_final_jit(rows)
        jit = best_of(_kernels._cusum_final_jit, rows, repeats)
        ref = best_of(_kernels._cusum_final_np, rows, repeats)
        label = f"{shape[0]}x{shape[1]}"
        print(f"{'cusum_final':<14} {label:<16} {jit * 1e3:>8.2f}ms {ref * 1e3:>8.2f}ms {ref / jit:>7.1f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    run(parser.parse_args().repeats)
