"""Benchmark: compiled vs pure-numpy RK4 trajectory kernels.

Runs the same integration workloads through both kernel builds and
prints wall times and the max endpoint deviation.  Usage:

    python benchmarks/bench_kernels.py [--t-end 500] [--repeats 3]
"""

import argparse
import time

import numpy as np

from sg2c import _accel


CASES = [
    ("multistable4 k=1.1", _accel.MULTISTABLE4, 1.1,
     np.array([0.5, 0.0, 0.5, 0.0])),
    ("thomas3 b=0.58", _accel.THOMAS_CYCLIC, 0.58,
     np.array([0.3, -0.2, 0.1])),
    ("thomas4 b=1.5", _accel.THOMAS_CYCLIC, 1.5,
     np.array([0.4, 0.1, -0.3, 0.2])),
]


def run(kernel, system_id, param, x0, step, n_steps):
    n = x0.size
    guard = 1e6 * np.ones(n)
    return kernel(system_id, param, x0, step, n_steps, -guard, guard)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=500.0)
    ap.add_argument("--step", type=float, default=1e-2)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    n_steps = int(round(args.t_end / args.step))

    numba_k = _accel.trajectory_kernel(use_numba=True)
    numpy_k = _accel.trajectory_kernel(use_numba=False)
    # compile outside the timed region
    run(numba_k, _accel.THOMAS_CYCLIC, 1.0, np.zeros(3), args.step, 1)

    print(f"{'case':24s} {'numba (s)':>12s} {'numpy (s)':>12s} "
          f"{'speedup':>9s} {'max dev':>10s}")
    for label, system_id, param, x0 in CASES:
        times = {}
        results = {}
        for name, kernel in (("numba", numba_k), ("numpy", numpy_k)):
            best = float("inf")
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                states, code, idx = run(kernel, system_id, param, x0,
                                        args.step, n_steps)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
            results[name] = states
        dev = float(np.abs(results["numba"] - results["numpy"]).max())
        print(f"{label:24s} {times['numba']:12.4f} {times['numpy']:12.4f} "
              f"{times['numpy'] / times['numba']:8.1f}x {dev:10.2e}")


if __name__ == "__main__":
    main()
