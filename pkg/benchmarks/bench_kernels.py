"""Timing comparison of the compiled kernels against the numpy reference.

Runs every kernel on workloads shaped like what the pipeline actually sees
(tens of thousands of rows, a few dozen columns) and prints best-of-N wall
times plus the speedup of the compiled extension over the pure path. If the
extension is unavailable the pure timings are still reported.

Usage: python3 benchmarks/bench_kernels.py [--rows N] [--cols D] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from matchbench._kernels import pure

try:
    from matchbench._kernels import _speedups as compiled
except ImportError:
    compiled = None


def _best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(rows, cols, iters, seed=0):
    rng = np.random.default_rng(seed)
    X = np.ascontiguousarray(rng.normal(size=(rows, cols)))
    y = np.where(rng.random(rows) < 0.4, 1.0, -1.0)
    w = rng.normal(size=cols)
    b = 0.3
    lam = 0.01
    scores = np.round(rng.normal(size=rows), 2)  # ties exercise the rank runs
    labels01 = (y > 0).astype(np.int64)
    w0 = np.zeros(cols)
    return [
        ("logistic_value_grad", (X, y, w, b, lam)),
        ("hinge_value_grad", (X, y, w, b, lam)),
        ("logistic_gd", (X, y, lam, 0.05, 1e-9, iters, w0, 0.0)),
        ("hinge_subgradient", (X, y, lam, 1.0, iters, w0, 0.0)),
        ("midranks", (scores,)),
        ("roc_auc_kernel", (scores, labels01)),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=25000)
    parser.add_argument("--cols", type=int, default=24)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--iters", type=int, default=200, help="GD iterations")
    args = parser.parse_args(argv)

    print(f"rows={args.rows} cols={args.cols} repeats={args.repeats} iters={args.iters}")
    if compiled is None:
        print("compiled extension not available; timing the pure backend only")
    header = f"{'kernel':<22}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call_args in _workloads(args.rows, args.cols, args.iters):
        t_pure = _best_of(getattr(pure, name), call_args, args.repeats)
        if compiled is None:
            print(f"{name:<22}{t_pure * 1e3:>12.2f}{'n/a':>15}{'n/a':>10}")
            continue
        t_fast = _best_of(getattr(compiled, name), call_args, args.repeats)
        ratio = t_pure / t_fast if t_fast > 0 else float("inf")
        print(f"{name:<22}{t_pure * 1e3:>12.2f}{t_fast * 1e3:>15.2f}{ratio:>9.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
