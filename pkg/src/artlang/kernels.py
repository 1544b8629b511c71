"""Pairwise Levenshtein kernels.

Two interchangeable backends: a numba-jitted parallel loop and a pure-numpy
vectorized DP (prefix-min trick for the insertion dependency).  Backend is
chosen automatically; set ARTLANG_NUMBA=0 to force the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = os.environ.get("ARTLANG_NUMBA", "").strip()

if _ENV_FLAG == "0":
    _lev_numba = None
else:
    try:
        from numba import njit, prange

        @njit(parallel=True, cache=True)
        def _lev_numba(padded, lengths, idx_a, idx_b):  # pragma: no cover - jitted
            n_pairs = idx_a.shape[0]
            out = np.empty(n_pairs, dtype=np.int32)
            for p in prange(n_pairs):
                ia = idx_a[p]
                ib = idx_b[p]
                la = lengths[ia]
                lb = lengths[ib]
                prev = np.empty(lb + 1, dtype=np.int32)
                curr = np.empty(lb + 1, dtype=np.int32)
                for j in range(lb + 1):
                    prev[j] = j
                for i in range(1, la + 1):
                    curr[0] = i
                    ca = padded[ia, i - 1]
                    for j in range(1, lb + 1):
                        d = prev[j - 1]
                        if padded[ib, j - 1] != ca:
                            d += 1
                        if prev[j] + 1 < d:
                            d = prev[j] + 1
                        if curr[j - 1] + 1 < d:
                            d = curr[j - 1] + 1
                        curr[j] = d
                    prev, curr = curr, prev
                out[p] = prev[lb]
            return out

    except ImportError:  # pragma: no cover - exercised only without numba
        _lev_numba = None


def active_backend() -> str:
    """Name of the backend pairwise_levenshtein will use by default."""
    return "numba" if _lev_numba is not None else "numpy"


def pack_messages(messages) -> tuple[np.ndarray, np.ndarray]:
    """Pad variable-length messages into (array[N, L], lengths[N])."""
    lengths = np.fromiter((len(m) for m in messages), dtype=np.int32, count=len(messages))
    width = max(1, int(lengths.max(initial=0)))
    padded = np.zeros((len(messages), width), dtype=np.int16)
    for i, msg in enumerate(messages):
        padded[i, : len(msg)] = msg
    return padded, lengths


def _lev_numpy(padded, lengths, idx_a, idx_b, chunk=1 << 18):
    width = padded.shape[1]
    cols = np.arange(width + 1, dtype=np.int32)
    out = np.empty(idx_a.shape[0], dtype=np.int32)
    for start in range(0, idx_a.shape[0], chunk):
        ia = idx_a[start : start + chunk]
        ib = idx_b[start : start + chunk]
        a = padded[ia]
        b = padded[ib]
        la = lengths[ia].astype(np.int64)
        lb = lengths[ib].astype(np.int64)
        n = ia.shape[0]
        prev = np.broadcast_to(cols, (n, width + 1)).copy()
        res = np.where(la == 0, lb, 0).astype(np.int32)
        rows = np.arange(n)
        shifted = np.empty((n, width + 1), dtype=np.int32)
        for i in range(1, width + 1):
            cost = (b != a[:, i - 1 : i]).astype(np.int32)
            best = np.minimum(prev[:, 1:] + 1, prev[:, :-1] + cost)
            # curr[j] = min(best[j-1], curr[j-1]+1) with curr[0]=i, solved by
            # a prefix-min over best[j]-j (insertion chain becomes monotone).
            shifted[:, 0] = i
            shifted[:, 1:] = best - cols[1:]
            prev = np.minimum.accumulate(shifted, axis=1) + cols
            hit = la == i
            if hit.any():
                res[hit] = prev[rows[hit], lb[hit]]
        out[start : start + chunk] = res
    return out


def pairwise_levenshtein(padded: np.ndarray, lengths: np.ndarray,
                         idx_a: np.ndarray, idx_b: np.ndarray,
                         backend: str | None = None) -> np.ndarray:
    """Edit distances between message pairs (padded[idx_a[k]], padded[idx_b[k]]).

    backend: None (auto), "numba", or "numpy".
    """
    idx_a = np.ascontiguousarray(idx_a, dtype=np.int64)
    idx_b = np.ascontiguousarray(idx_b, dtype=np.int64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int32)
    padded = np.ascontiguousarray(padded, dtype=np.int16)
    if backend is None:
        backend = active_backend()
    if backend == "numba":
        if _lev_numba is None:
            raise RuntimeError("numba backend requested but unavailable")
        return _lev_numba(padded, lengths, idx_a, idx_b)
    if backend == "numpy":
        return _lev_numpy(padded, lengths, idx_a, idx_b)
    raise ValueError(f"unknown backend {backend!r}")
