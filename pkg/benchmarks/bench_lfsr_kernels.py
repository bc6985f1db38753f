"""Compare the batched sequence-evaluation backends.

Workload: n random (a, b, k, p) with p a prime below 50 and k up to 900,
the shape of the exhaustive composition check. Reports best-of-r wall time
per backend and checks that all backends agree.

    python benchmarks/bench_lfsr_kernels.py --n 200000 --repeat 5
"""

import argparse
import time

import numpy as np

from dvmss import _kernels
from dvmss.lfsr import LfsrParams, seq_eval

PRIMES = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])


def workload(n, seed=0):
    rng = np.random.default_rng(seed)
    mod = rng.choice(PRIMES, n)
    return rng.integers(0, 50, n) % mod, rng.integers(0, 50, n) % mod, rng.integers(1, 901, n), mod


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scalar-n", type=int, default=5_000, help="subsample for the pure-Python path")
    args = ap.parse_args()

    a, b, k, mod = workload(args.n)
    results = {}
    if _kernels._trace_power_numba is not None:
        _kernels.trace_power(a[:10], b[:10], k[:10], mod[:10], backend="numba")  # compile
        results["numba"] = best_of(lambda: _kernels.trace_power(a, b, k, mod, backend="numba"), args.repeat)
    results["numpy"] = best_of(lambda: _kernels.trace_power(a, b, k, mod, backend="numpy"), args.repeat)

    s = slice(0, args.scalar_n)
    scalar_t, scalar_out = best_of(
        lambda: [seq_eval(LfsrParams(int(x), int(y), int(p)), int(e))
                 for x, y, e, p in zip(a[s], b[s], k[s], mod[s])], 1)

    ref = results["numpy"][1]
    for name, (_, out) in results.items():
        assert np.array_equal(out, ref), f"{name} disagrees with numpy"
    assert list(ref[s]) == scalar_out, "scalar path disagrees"

    print(f"{'backend':8s} {'n':>9s} {'seconds':>9s} {'evals/s':>12s}")
    for name, (t, _) in results.items():
        print(f"{name:8s} {args.n:9d} {t:9.4f} {args.n / t:12.0f}")
    print(f"{'scalar':8s} {args.scalar_n:9d} {scalar_t:9.4f} {args.scalar_n / scalar_t:12.0f}")


if __name__ == "__main__":
    main()
