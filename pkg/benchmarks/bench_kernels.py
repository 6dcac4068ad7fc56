#!/usr/bin/env python3
"""Benchmark the compiled series kernel against the pure-Python fallback.

The double-precision series loop dominates grid scans (bell-shape
verification evaluates it tens of thousands of times), which is why it
ships as a Cython extension with a pure twin.  This script times both on
identical workloads and checks they agree bitwise.

    python benchmarks/bench_kernels.py [--points 2000] [--repeats 3]
"""

import argparse
import time

import numpy as np

from bellshape import _kernels
from bellshape._kernels import _series_py
from bellshape.stable import _double_table


def _workloads():
    # (label, alpha, coefficient family g = derivative order + 1)
    return [
        ("density a=0.5", 0.5, 1),
        ("fourth derivative a=0.3", 0.3, 5),
        ("sixth derivative a=0.7", 0.7, 7),
    ]


def _time_backend(fn, logc, sgn, alpha, g, xs, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(logc, sgn, alpha, float(g), xs, 1e-17, 100_000, True)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if _kernels.backend_name() == "python":
        print("compiled backend unavailable; timing the pure backend only")

    print(f"{'workload':32s} {'pure (s)':>10s} {'compiled (s)':>13s} {'speedup':>8s}")
    for name, alpha, g in _workloads():
        logc, sgn = _double_table(alpha, g, 8192)
        xs = np.geomspace(0.11, 50.0, args.points)
        t_py, out_py = _time_backend(
            _series_py.eval_series_grid, logc, sgn, alpha, g, xs, args.repeats
        )
        if _kernels.backend_name() == "cython":
            t_cy, out_cy = _time_backend(
                _kernels.eval_series_grid, logc, sgn, alpha, g, xs, args.repeats
            )
            identical = all(a == b for a, b in zip(out_py[0], out_cy[0]))
            print(
                f"{name:32s} {t_py:10.4f} {t_cy:13.4f} {t_py / t_cy:7.1f}x"
                + ("" if identical else "  MISMATCH")
            )
        else:
            print(f"{name:32s} {t_py:10.4f} {'-':>13s} {'-':>8s}")


if __name__ == "__main__":
    main()
