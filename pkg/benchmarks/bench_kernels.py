"""Compare the compiled kernel-sum core with the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]

Times ``cross_rowsums`` and ``self_rowsums`` at the shapes the estimator
actually hits (a model batch of M points against n data points) and one
full PSGA run, and checks both cores agree.
"""

import argparse
import time

import numpy as np

from mmdrobust import _core_py
from mmdrobust.estimator import EstimatorConfig, psga
from mmdrobust.kernels import Kernel
from mmdrobust.models import GaussianLocation

try:
    from mmdrobust import _core
except ImportError:  # extension not built
    _core = None

SHAPES = [(500, 500, 1), (500, 500, 10), (5000, 50, 10), (5000, 100, 64)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _core is None:
        print("compiled core not available; run `python3 setup.py build_ext --inplace`")
        return
    rng = np.random.default_rng(0)
    print(f"{'op':14s} {'n':>6s} {'M':>5s} {'d':>4s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for n, M, d in SHAPES:
        data = rng.normal(size=(n, d))
        y = rng.normal(size=(M, d))
        gamma = float(np.sqrt(d))
        for op, a_fn, b_fn, args_ in (
            ("cross_rowsums", _core.cross_rowsums, _core_py.cross_rowsums, (data, y, gamma, 0)),
            ("self_rowsums", _core.self_rowsums, _core_py.self_rowsums, (y, gamma, 0)),
        ):
            np.testing.assert_allclose(a_fn(*args_), b_fn(*args_), rtol=1e-9, atol=1e-10)
            tc = best_of(lambda: a_fn(*args_), args.repeat)
            tp = best_of(lambda: b_fn(*args_), args.repeat)
            print(f"{op:14s} {n:6d} {M:5d} {d:4d} {1e3 * tc:10.3f} {1e3 * tp:10.3f} {tp / tc:8.2f}")

    # end to end: the estimator picks up whichever core the backend selected
    from mmdrobust import _backend
    data = rng.normal(size=(500, 10))
    cfg = EstimatorConfig(M=500, T=200, seed=0)
    k, model = Kernel("gaussian", np.sqrt(10)), GaussianLocation(1.0, 10)
    timings = {}
    for name, impl in (("cython", _core), ("python", _core_py)):
        _backend.cross_rowsums, _backend.self_rowsums = impl.cross_rowsums, impl.self_rowsums
        timings[name] = best_of(lambda: psga(k, model, data, cfg), 1)
    print(f"psga n=500 d=10 M=500 T=200: cython {timings['cython']:.2f}s, "
          f"python {timings['python']:.2f}s")


if __name__ == "__main__":
    main()
