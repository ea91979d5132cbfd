"""Benchmark the convolution kernels: compiled extension vs numpy/BLAS.

Times forward, grad-input, and grad-weights for every available backend
at training-shaped workloads.  Run with:

    python3 benchmarks/bench_conv.py
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gazeid import convops

SHAPES = [
    # (batch, time, in_channels, out_channels, kernel, dilation)
    (16, 1125, 2, 32, 3, 1),
    (16, 1125, 130, 32, 3, 8),
    (16, 1125, 226, 32, 3, 128),
]


def time_call(fn, *args, repeats: int) -> float:
    fn(*args)  # warm up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best * 1000.0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    impls = convops.backends()
    print(f"backends: {', '.join(impls)} (auto resolves to {convops.BACKEND_NAME})\n")
    header = f"{'shape':<34}{'op':<14}" + "".join(f"{n:>12}" for n in impls)
    print(header)
    print("-" * len(header))

    for batch, t_len, cin, cout, k, dil in SHAPES:
        x = rng.normal(size=(batch, t_len, cin))
        w = rng.normal(size=(cout, cin, k))
        b = rng.normal(size=cout)
        gy = rng.normal(size=(batch, t_len, cout))
        label = f"B{batch} T{t_len} C{cin}->{cout} d{dil}"
        ops = {
            "forward": lambda m: m.conv1d_forward(x, w, b, dil),
            "grad_input": lambda m: m.conv1d_grad_input(gy, w, dil),
            "grad_weights": lambda m: m.conv1d_grad_weights(gy, x, k, dil),
        }
        for op_name, op in ops.items():
            times = [time_call(op, m, repeats=args.repeats) for m in impls.values()]
            row = f"{label:<34}{op_name:<14}" + "".join(f"{t:>10.2f}ms" for t in times)
            print(row)

    # cross-check that every backend computes the same thing
    ref = None
    for name, m in impls.items():
        x = np.random.default_rng(1).normal(size=(2, 256, 8))
        w = np.random.default_rng(2).normal(size=(4, 8, 3))
        y = m.conv1d_forward(x, w, np.zeros(4), 4)
        if ref is None:
            ref = y
        else:
            print(f"\nmax |numpy - {name}| = {np.max(np.abs(y - ref)):.3e}")


if __name__ == "__main__":
    main()
