"""Benchmark the compiled kernels against the NumPy fallback.

Run:  python benchmarks/bench_kernels.py [N]
"""
import sys
import time

import numpy as np

from ratlink._kernels import fallback

try:
    from ratlink._kernels import _native as native
except ImportError:
    native = None


def bench(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    rng = np.random.default_rng(7)
    p0, p1, q0, q1 = (rng.uniform(-2, 2, (n, 3)) for _ in range(4))
    coeffs = rng.standard_normal((7, 8))
    ts = rng.uniform(-4, 4, n)

    print(f"batch size: {n}")
    rows = []
    t_f = bench(fallback.segment_min_distances, p0, p1, q0, q1)
    rows.append(("segment_min_distances", "fallback", t_f))
    if native is not None:
        t_n = bench(native.segment_min_distances, p0, p1, q0, q1)
        rows.append(("segment_min_distances", "native", t_n))
        rows.append(("segment_min_distances", "speedup", t_f / t_n))
    t_f = bench(fallback.polyvec_eval, coeffs, ts)
    rows.append(("polyvec_eval", "fallback", t_f))
    if native is not None:
        t_n = bench(native.polyvec_eval, coeffs, ts)
        rows.append(("polyvec_eval", "native", t_n))
        rows.append(("polyvec_eval", "speedup", t_f / t_n))

    for name, kind, val in rows:
        if kind == "speedup":
            print(f"{name:26s} {kind:9s} {val:8.2f}x")
        else:
            print(f"{name:26s} {kind:9s} {val * 1e3:8.3f} ms")


if __name__ == "__main__":
    main()
