#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    try:
        from samurai.kernels import _core
    except ImportError:
        _core = None
    from samurai.kernels import _fallback

    rng = np.random.default_rng(0)
    mask = rng.random((512, 512)) < 0.5
    matrix = np.ascontiguousarray(rng.standard_normal((2000, 512)), dtype=np.float32)
    query = rng.standard_normal(512).astype(np.float32)

    cases = [
        ("label_components 512x512 conn=8",
         lambda impl: impl.label_components(mask, 8)),
        ("label_components 512x512 conn=4",
         lambda impl: impl.label_components(mask, 4)),
        ("score_matrix_f32 2000x512",
         lambda impl: impl.score_matrix_f32(matrix, query)),
        ("dot_f32 512",
         lambda impl: impl.dot_f32(query, query)),
    ]

    print(f"{'kernel':<36} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, call in cases:
        py = best_of(lambda: call(_fallback), args.repeat)
        if _core is None:
            print(f"{name:<36} {py * 1e3:>10.2f}ms {'n/a':>12} {'n/a':>9}")
            continue
        cc = best_of(lambda: call(_core), args.repeat)
        print(f"{name:<36} {py * 1e3:>10.2f}ms {cc * 1e3:>10.2f}ms {py / cc:>8.1f}x")

    if _core is not None:
        # sanity: the two backends must agree bit for bit
        assert np.array_equal(_core.label_components(mask, 8),
                              _fallback.label_components(mask, 8))
        assert np.array_equal(_core.score_matrix_f32(matrix[:64], query),
                              _fallback.score_matrix_f32(matrix[:64], query))
        print("\nbackends agree bit-for-bit on the benchmark inputs")


if __name__ == "__main__":
    main()
