"""Compare the numba and numpy render kernels.

Usage: python benchmarks/render_bench.py [--size 512] [--iters 5]
"""

import argparse
import time

import numpy as np

from nftmarket.genart.kernels import render_numba, render_numpy


def bench(fn, seed, size, iters):
    fn(seed, size, size)  # warm up (jit compile / cache touch)
    best = float("inf")
    for _ in range(iters):
        start = time.perf_counter()
        fn(seed, size, size)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--iters", type=int, default=5)
    args = parser.parse_args()

    seed = 0x5EEDBA5EBA11
    t_np = bench(render_numpy, seed, args.size, args.iters)
    t_nb = bench(render_numba, seed, args.size, args.iters)
    same = np.array_equal(render_numpy(seed, args.size, args.size),
                          render_numba(seed, args.size, args.size))

    print(f"size {args.size}x{args.size}, best of {args.iters}:")
    print(f"  numpy  {t_np * 1000:8.2f} ms")
    print(f"  numba  {t_nb * 1000:8.2f} ms   (speedup {t_np / t_nb:.1f}x)")
    print(f"  outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
