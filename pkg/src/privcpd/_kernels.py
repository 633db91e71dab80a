"""Hot numeric kernels, numba-compiled with pure-numpy fallbacks.

Set ``PRIVCPD_NO_NUMBA=1`` in the environment to force the numpy
implementations.  When numba imports, both variants stay importable under
their private names so the benchmark and cross-checking tests can compare
the two paths directly.
"""

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("PRIVCPD_NO_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _suffix_sums_np(ratios: np.ndarray) -> np.ndarray:
    # Extended precision keeps the suffix-difference identity tight even for
    # very long, same-signed inputs (80-bit accumulate, then one rounding).
    acc = np.cumsum(ratios[::-1].astype(np.longdouble))
    return acc[::-1].astype(np.float64)


def _cusum_final_np(ratio_rows: np.ndarray) -> np.ndarray:
    # Runs the recursion w = max(w, 0) + r across time, vectorized over
    # streams; per-stream op order matches the jit path exactly.
    w = ratio_rows[:, 0].copy()
    for j in range(1, ratio_rows.shape[1]):
        np.maximum(w, 0.0, out=w)
        w += ratio_rows[:, j]
    return w


if HAS_NUMBA:

    @njit(cache=True)
    def _suffix_sums_jit(ratios):
        # Neumaier-compensated backward accumulation.
        n = ratios.shape[0]
        out = np.empty(n)
        s = 0.0
        c = 0.0
        for i in range(n - 1, -1, -1):
            r = ratios[i]
            t = s + r
            if abs(s) >= abs(r):
                c += (s - t) + r
            else:
                c += (r - t) + s
            s = t
            out[i] = s + c
        return out

    @njit(cache=True)
    def _cusum_final_jit(ratio_rows):
        m, n = ratio_rows.shape
        out = np.empty(m)
        for i in range(m):
            w = ratio_rows[i, 0]
            for j in range(1, n):
                if w < 0.0:
                    w = 0.0
                w += ratio_rows[i, j]
            out[i] = w
        return out


USE_NUMBA = HAS_NUMBA and not NUMBA_DISABLED

_suffix_impl = _suffix_sums_jit if USE_NUMBA else _suffix_sums_np
_cusum_impl = _cusum_final_jit if USE_NUMBA else _cusum_final_np


def suffix_sums(ratios) -> np.ndarray:
    """Backward cumulative sums: out[k] = ratios[k] + ... + ratios[-1]."""
    arr = np.ascontiguousarray(ratios, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("ratios must be a non-empty 1-d array")
    return _suffix_impl(arr)


def cusum_final(ratio_rows) -> np.ndarray:
    """Final CUSUM statistic per row of a (streams x time) ratio matrix,
    seeded so each row's statistic is its best suffix sum."""
    rows = np.ascontiguousarray(ratio_rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] == 0:
        raise ValueError("ratio_rows must be a 2-d array with at least one column")
    return _cusum_impl(rows)
