"""Compare the jit-compiled best-response search kernel against the pure
Python fallback on synthetic payoff tensors shaped like real game searches.

Usage: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from qfree.kernels import USE_NUMBA, _best_response_search_py

try:
    from qfree.kernels import _best_response_search_nb
except ImportError:
    _best_response_search_nb = None


def make_case(rng, nx, ny, n_ax, n_by):
    P = rng.integers(0, 100, size=(nx, n_ax, ny, n_by)).astype(np.int64)
    wA = rng.integers(1, 10, size=nx).astype(np.int64)
    return P, wA, [n_ax] * nx, [n_by] * ny


def bench(fn, args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    rng = np.random.default_rng(0)
    cases = [
        ("small  (6 questions, 4^6 strategies)", make_case(rng, 6, 6, 4, 4)),
        ("medium (8 questions, 4^8 strategies)", make_case(rng, 8, 8, 4, 4)),
        ("large  (10 questions, 4^10 strategies)", make_case(rng, 10, 10, 4, 4)),
    ]
    print(f"numba available and enabled: {USE_NUMBA}")
    for name, args in cases:
        t_py, (v_py, _) = bench(_best_response_search_py, args)
        line = f"{name}: python {t_py * 1e3:8.1f} ms"
        if USE_NUMBA and _best_response_search_nb is not None:
            _best_response_search_nb(*args)  # warm the jit cache
            t_nb, (v_nb, _) = bench(_best_response_search_nb, args)
            assert v_nb == v_py
            line += f"   numba {t_nb * 1e3:8.1f} ms   speedup {t_py / t_nb:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
