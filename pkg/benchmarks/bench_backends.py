"""Benchmark the numba kernel against the pure-numpy fallback.

Run:  python3 benchmarks/bench_backends.py
The same comparison at package level is selected by PTDEP_BACKEND.
"""

import time

import numpy as np

from ptdep.kernels import HAVE_NUMBA, _logbf_numpy
from ptdep.engine import PartitionConfig, test_dependence
from ptdep.transforms import PairedSample

DEPTH_CAP = 20
C = 5.0
SIZES = (100, 500, 1_000, 5_000, 20_000, 100_000)


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    rng = np.random.default_rng(0)
    kernels = [("numpy", _logbf_numpy)]
    if HAVE_NUMBA:
        from ptdep.kernels import _logbf_numba

        # trigger JIT compilation outside the timed region
        _logbf_numba(np.array([0.2, 0.7]), np.array([0.3, 0.8]), DEPTH_CAP, C)
        kernels.append(("numba", _logbf_numba))

    print(f"{'n':>8}  " + "".join(f"{name:>12}" for name, _ in kernels) + f"{'speedup':>10}")
    for n in SIZES:
        u = rng.uniform(1e-9, 1 - 1e-9, n)
        v = rng.uniform(1e-9, 1 - 1e-9, n)
        repeats = max(3, min(50, 200_000 // n))
        times = {}
        for name, kernel in kernels:
            times[name] = timeit(lambda k=kernel: k(u, v, DEPTH_CAP, C), repeats)
        row = f"{n:>8}  " + "".join(f"{times[name] * 1e3:>10.3f}ms" for name, _ in kernels)
        if HAVE_NUMBA:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)

    # end-to-end pipeline under the active backend
    print()
    sample = PairedSample(x=rng.standard_normal(4000), y=rng.standard_normal(4000))
    cfg = PartitionConfig()
    test_dependence(sample, cfg)
    t = timeit(lambda: test_dependence(sample, cfg), 20)
    from ptdep.kernels import active_backend

    print(f"full test_dependence, n=4000, backend={active_backend()}: {t * 1e3:.3f} ms")


if __name__ == "__main__":
    main()
