"""Edit-distance kernel.

This is the one hot inner loop in the toolkit: every candidate pairing during
alignment costs an O(n*m) Levenshtein pass over concatenated event text.  The
default backend is a numba-jitted two-row DP over int32 code points; setting
``SCRIPTEVAL_NO_NUMBA=1`` (or numba being unimportable) selects a vectorised
pure-numpy backend instead.  Both return identical integers; see
``benchmarks/bench_editdist.py`` for a speed comparison.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "SCRIPTEVAL_NO_NUMBA"


def _numpy_levenshtein(a: np.ndarray, b: np.ndarray) -> int:
    """Row-vectorised DP.  The insertion recurrence is serial, so each row is
    finished with the running-minimum identity
    ``D[j] = min_k<=j (t[k] + (j - k))``  ==  ``cummin(t - j) + j``."""
    n, m = a.shape[0], b.shape[0]
    idx = np.arange(m + 1)
    prev = idx.copy()
    for i in range(1, n + 1):
        t = np.empty(m + 1, dtype=np.int64)
        t[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i - 1]), out=t[1:])
        prev = np.minimum.accumulate(t - idx) + idx
    return int(prev[m])


_backend_name = "numpy"
if os.environ.get(_ENV_FLAG, "").strip().lower() not in ("1", "true", "yes"):
    try:
        from numba import njit

        @njit(cache=True)
        def _njit_levenshtein(a: np.ndarray, b: np.ndarray) -> int:  # pragma: no cover
            n = a.shape[0]
            m = b.shape[0]
            prev = np.arange(m + 1, dtype=np.int64)
            cur = np.empty(m + 1, dtype=np.int64)
            for i in range(1, n + 1):
                cur[0] = i
                ai = a[i - 1]
                for j in range(1, m + 1):
                    cost = 0 if b[j - 1] == ai else 1
                    best = prev[j] + 1
                    if cur[j - 1] + 1 < best:
                        best = cur[j - 1] + 1
                    if prev[j - 1] + cost < best:
                        best = prev[j - 1] + cost
                    cur[j] = best
                prev, cur = cur, prev
            return int(prev[m])

        _backend_name = "numba"
    except ImportError:
        _njit_levenshtein = None  # type: ignore[assignment]
else:
    _njit_levenshtein = None  # type: ignore[assignment]


def backend() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return _backend_name


def _codepoints(s: str) -> np.ndarray:
    return np.array([ord(c) for c in s], dtype=np.int32)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance between two strings, exact integer."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    arr_a, arr_b = _codepoints(a), _codepoints(b)
    if _backend_name == "numba":
        return _njit_levenshtein(arr_a, arr_b)
    return _numpy_levenshtein(arr_a, arr_b)
