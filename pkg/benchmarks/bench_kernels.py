"""Compare the JIT and numpy kernel backends on representative workloads.

Usage:
    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs the same inputs through both backends; reported numbers
are best-of-repeat wall times plus the speedup ratio. The forest row is an
end-to-end microbenchmark (stream learning), everything else is per-kernel.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from streamguard import kernels


def _best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_welford(impl, repeat):
    rng = np.random.default_rng(0)
    ns = np.zeros(25)
    means = np.zeros(25)
    m2s = np.zeros(25)
    mins = np.full(25, np.inf)
    maxs = np.full(25, -np.inf)
    xs = rng.normal(size=(20_000, 25))

    def run():
        for x in xs:
            impl(ns, means, m2s, mins, maxs, x, 1.0)

    return _best_of(repeat, run)


def bench_loglik(impl, repeat):
    rng = np.random.default_rng(1)
    ns = np.full((2, 25), 50.0)
    means = rng.normal(size=(2, 25))
    m2s = np.abs(rng.normal(size=(2, 25))) * 50
    xs = rng.normal(size=(20_000, 25))
    out = np.zeros(2)

    def run():
        for x in xs:
            impl(ns, means, m2s, x, 1e-9, out)

    return _best_of(repeat, run)


def bench_split_scan(impl, repeat):
    rng = np.random.default_rng(2)
    ns = np.abs(rng.normal(size=(2, 25))) * 100 + 10
    means = rng.normal(size=(2, 25))
    m2s = np.abs(rng.normal(size=(2, 25))) * 100
    mins = means.min(axis=0) - 3
    maxs = means.max(axis=0) + 3
    gains = np.zeros(25)
    thresholds = np.zeros(25)

    def run():
        for _ in range(2_000):
            impl(ns, means, m2s, mins, maxs, 10, 1e-9, gains, thresholds)

    return _best_of(repeat, run)


def bench_adwin(impl, repeat):
    rng = np.random.default_rng(3)
    values = (rng.random(50_000) < 0.5).astype(float)

    def run():
        bsum, bvar, rowcnt, agg = kernels.new_adwin_arrays()
        for v in values:
            impl(bsum, bvar, rowcnt, agg, v, 0.002, 1)

    return _best_of(repeat, run)


KERNEL_BENCHES = {
    "welford_update (20k x 25)": ("welford_update", bench_welford),
    "gaussian_loglik (20k x 25)": ("gaussian_joint_loglik", bench_loglik),
    "split_gain_scan (2k x 25x10)": ("split_gain_scan", bench_split_scan),
    "adwin_step (50k inserts)": ("adwin_step", bench_adwin),
}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}; comparing: {sorted(backends)}")
    kernels.warmup()

    header = f"{'kernel':<30s} " + "".join(f"{b:>12s}" for b in sorted(backends))
    print(header)
    print("-" * len(header))
    rows = {}
    for label, (name, bench) in KERNEL_BENCHES.items():
        times = {}
        for backend in sorted(backends):
            impl = backends[backend][name]
            if backend == "numba":
                bench(impl, 1)  # compile outside the timed region
            times[backend] = bench(impl, args.repeat)
        rows[label] = times
        cells = "".join(f"{times[b]*1000:>10.1f}ms" for b in sorted(backends))
        print(f"{label:<30s} {cells}")

    if {"numba", "numpy"} <= set(backends):
        print("\nspeedup (numpy / numba):")
        for label, times in rows.items():
            print(f"  {label:<30s} {times['numpy'] / times['numba']:>6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
