"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --n 500 --B 2000

Both backends are imported directly, so the ``CORRBREAK_BACKEND`` flag is
not needed here. Each kernel is checked for agreement before timing.
"""
import argparse
import time

import numpy as np

from corrbreak import _kernels_numba as nb
from corrbreak import _kernels_numpy as npk


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, B, m, lags):
    rng = np.random.default_rng(1)
    t = np.arange(1, n + 1) / n
    y = np.sin(6 * t) + rng.standard_normal(n)
    centered = rng.standard_normal((lags, n - m + 1))
    R = rng.standard_normal((B, n - m + 1))
    t_hat = np.full(lags, 0.5)
    coefs = np.full((n + 1000, 2), 0.2)
    eps = rng.standard_normal(n + 1000)
    return {
        "local_linear": lambda k: k.local_linear(t, y, 0.1, 0),
        "classical_bootstrap": lambda k: k.classical_bootstrap(centered, R, m, n, False),
        "relevant_bootstrap": lambda k: k.relevant_bootstrap(centered, R, m, n, t_hat),
        "ar_filter": lambda k: k.ar_filter(coefs, eps, 1000),
    }


def agree(a, b):
    if isinstance(a, tuple):
        return all(agree(x, y) for x, y in zip(a, b))
    if isinstance(a, (bool, np.bool_)):
        return a == b
    return np.allclose(a, b, rtol=1e-9, atol=1e-12)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--B", type=int, default=2000)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--lags", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"n={args.n} B={args.B} m={args.m} lags={args.lags}")
    print(f"{'kernel':<22}{'numba ms':>10}{'numpy ms':>10}{'speedup':>9}  agree")
    for name, call in cases(args.n, args.B, args.m, args.lags).items():
        ok = agree(call(nb), call(npk))  # also triggers compilation
        t_nb = best_of(lambda: call(nb), args.repeat)
        t_np = best_of(lambda: call(npk), args.repeat)
        print(f"{name:<22}{1e3 * t_nb:>10.2f}{1e3 * t_np:>10.2f}{t_np / t_nb:>8.1f}x  {ok}")


if __name__ == "__main__":
    main()
