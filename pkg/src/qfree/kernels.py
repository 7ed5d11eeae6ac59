"""Hot inner loops with numba-compiled and pure-Python/numpy variants.

The exhaustive strategy search behind exact game values dominates runtime.
The numba path is used by default; set QFREE_NO_NUMBA=1 (or run without
numba installed) to select the fallback.  benchmarks/bench_kernels.py
compares the two.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("QFREE_NO_NUMBA", "") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def _best_response_search_py(P, wA, n_ax, n_by):
    """Exhaust one side's deterministic strategies, best-responding the other.

    P[x, ax, y, by] is the weighted win indicator wB(y) * win(x, ax, y, by);
    returns (best integer score, lexicographically first optimal strategy b),
    where score(b) = sum_x wA[x] * max_ax sum_y P[x, ax, y, b[y]].
    """
    nx, max_ax, ny, _ = P.shape
    T = np.zeros((nx, max_ax), dtype=P.dtype)
    b = np.full(ny, -1, dtype=np.int64)
    best_b = np.zeros(ny, dtype=np.int64)
    best = None
    d = 0
    while d >= 0:
        if b[d] >= 0:
            T -= P[:, :, d, b[d]]
        b[d] += 1
        if b[d] >= n_by[d]:
            b[d] = -1
            d -= 1
            continue
        T += P[:, :, d, b[d]]
        if d == ny - 1:
            score = 0
            for x in range(nx):
                score += wA[x] * max(T[x, ax] for ax in range(n_ax[x]))
            if best is None or score > best:
                best = score
                best_b[:] = b
        else:
            d += 1
    return best, best_b


if USE_NUMBA:

    @njit(cache=True)
    def _best_response_search_nb(P, wA, n_ax, n_by):  # pragma: no cover - jitted
        nx, max_ax, ny, _ = P.shape
        T = np.zeros((nx, max_ax), dtype=P.dtype)
        b = np.full(ny, -1, dtype=np.int64)
        best_b = np.zeros(ny, dtype=np.int64)
        best = P[0, 0, 0, 0]  # placeholder; reset on first leaf
        have_best = False
        d = 0
        while d >= 0:
            if b[d] >= 0:
                prev = b[d]
                for x in range(nx):
                    for ax in range(max_ax):
                        T[x, ax] -= P[x, ax, d, prev]
            b[d] += 1
            if b[d] >= n_by[d]:
                b[d] = -1
                d -= 1
                continue
            cur = b[d]
            for x in range(nx):
                for ax in range(max_ax):
                    T[x, ax] += P[x, ax, d, cur]
            if d == ny - 1:
                score = T[0, 0] - T[0, 0]
                for x in range(nx):
                    mx = T[x, 0]
                    for ax in range(1, n_ax[x]):
                        if T[x, ax] > mx:
                            mx = T[x, ax]
                    score += wA[x] * mx
                if (not have_best) or score > best:
                    best = score
                    have_best = True
                    for y in range(ny):
                        best_b[y] = b[y]
            else:
                d += 1
        return best, best_b


def best_response_search(P: np.ndarray, wA: np.ndarray, n_ax, n_by):
    """Dispatch to the numba kernel or the pure-Python fallback."""
    n_ax = np.asarray(n_ax, dtype=np.int64)
    n_by = np.asarray(n_by, dtype=np.int64)
    if USE_NUMBA:
        best, best_b = _best_response_search_nb(P, wA, n_ax, n_by)
        return best, best_b
    return _best_response_search_py(P, wA, n_ax, n_by)
