"""Benchmark the compiled accumulation kernel against the numpy fallback.

Two measurements per configuration:

* raw kernel: one accumulate_block call on presampled inputs
* end to end: run_monte_carlo with the kernel module injected

Usage::

    python3 benchmarks/bench_kernels.py [--reps 200000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kflats.geometry import ProcessParams
from kflats.simulator import run_monte_carlo
from kflats.simulator import _kernel_py
from kflats.simulator.engine import mean_flat_count, sample_distances

try:
    from kflats.simulator import _kernel
except ImportError:
    _kernel = None


def _block_inputs(p: ProcessParams, n_reps: int, seed: int):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    counts = rng.poisson(mean_flat_count(p), size=n_reps).astype(np.int64)
    dist = sample_distances(p, int(counts.sum()), rng)
    return counts, dist


def bench_raw(p: ProcessParams, n_reps: int, max_order: int, repeat: int):
    from kflats.geometry import intrinsic_volume_ball
    from kflats.moments import expected_intrinsic_volume
    from kflats.simulator.accumulator import n_pairs

    counts, dist = _block_inputs(p, n_reps, seed=123)
    ncomp = p.k + 1
    coeffs = np.array([intrinsic_volume_ball(p.k, j, 1.0) for j in range(ncomp)])
    shift = np.array([expected_intrinsic_volume(p, j) for j in range(ncomp)])

    results = {}
    for name, mod in (("python", _kernel_py), ("cython", _kernel)):
        if mod is None:
            results[name] = None
            continue
        best = float("inf")
        for _ in range(repeat):
            ps = np.zeros((ncomp, max_order))
            cs = np.zeros((n_pairs(ncomp), 6))
            t0 = time.perf_counter()
            mod.accumulate_block(dist, counts, coeffs, shift, p.radius, max_order, ps, cs)
            best = min(best, time.perf_counter() - t0)
        results[name] = best
    return results


def bench_end_to_end(p: ProcessParams, n_reps: int, max_order: int, repeat: int):
    results = {}
    for name, mod in (("python", _kernel_py), ("cython", _kernel)):
        if mod is None:
            results[name] = None
            continue
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            run_monte_carlo(
                p, j_max=p.k, n_reps=n_reps, max_order=max_order, seed=7,
                workers=1, kernel_module=mod,
            )
            best = min(best, time.perf_counter() - t0)
        results[name] = best
    return results


def _report(label: str, results: dict) -> None:
    py = results["python"]
    cy = results["cython"]
    if cy is None:
        print(f"{label:<34} python {py * 1e3:8.2f} ms   cython unavailable")
    else:
        print(
            f"{label:<34} python {py * 1e3:8.2f} ms   "
            f"cython {cy * 1e3:8.2f} ms   speedup {py / cy:5.1f}x"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=200000)
    parser.add_argument("--max-order", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _kernel is None:
        print("note: compiled kernel not importable; showing fallback only")

    configs = [
        ProcessParams(2, 1, 1.0, 1.0),
        ProcessParams(3, 2, 1.0, 1.0),
        ProcessParams(6, 4, 1.0, 1.0),
    ]
    print(f"reps={args.reps} max_order={args.max_order} repeat={args.repeat}")
    for p in configs:
        label = f"raw kernel    d={p.d} k={p.k}"
        _report(label, bench_raw(p, args.reps, args.max_order, args.repeat))
    for p in configs:
        label = f"end to end    d={p.d} k={p.k}"
        _report(label, bench_end_to_end(p, args.reps, args.max_order, args.repeat))


if __name__ == "__main__":
    main()
