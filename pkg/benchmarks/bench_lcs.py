"""Compare the compiled and pure-Python LCS kernels.

Usage: python3 benchmarks/bench_lcs.py [--sizes 50,200,800] [--repeat 5]
"""

import argparse
import random
import statistics
import time

from assertify._kernels import KERNEL_BACKEND, lcs_length, lcs_length_py


def bench(fn, pairs, repeat):
    times = []
    for _ in range(repeat):
        started = time.perf_counter()
        for a, b in pairs:
            fn(a, b)
        times.append(time.perf_counter() - started)
    return min(times), statistics.mean(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="50,200,800")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--pairs", type=int, default=20)
    args = parser.parse_args()

    rng = random.Random(1)
    print(f"active kernel backend: {KERNEL_BACKEND}")
    print(f"{'size':>6}  {'compiled best':>14}  {'pure best':>14}  {'speedup':>8}")
    for size in (int(s) for s in args.sizes.split(",")):
        pairs = [
            (
                [rng.randint(0, 50) for _ in range(size)],
                [rng.randint(0, 50) for _ in range(size)],
            )
            for _ in range(args.pairs)
        ]
        for a, b in pairs[:3]:
            assert lcs_length(a, b) == lcs_length_py(a, b)
        fast_best, _ = bench(lcs_length, pairs, args.repeat)
        pure_best, _ = bench(lcs_length_py, pairs, args.repeat)
        speedup = pure_best / fast_best if fast_best else float("inf")
        print(f"{size:>6}  {fast_best:>13.4f}s  {pure_best:>13.4f}s  {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
