"""Batched small-modulus kernels for characteristic-sequence evaluation.

Two interchangeable backends compute ``s_k(a, b) mod n`` elementwise over
int64 arrays: a numba ``@njit`` loop and a vectorised numpy fallback. The
numba path is used when numba imports and ``DVMSS_DISABLE_NUMBA`` is unset
(or "0"). Both require moduli below ``SMALL_MODULUS_LIMIT`` so that a sum of
three residue products stays inside int64.
"""

from __future__ import annotations

import os

import numpy as np

SMALL_MODULUS_LIMIT = 1 << 30

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

USE_NUMBA = njit is not None and os.environ.get("DVMSS_DISABLE_NUMBA", "0") in ("", "0")


def _trace_power_numpy(a, b, k, mod):
    n = a.shape[0]
    m = mod[:, None, None]
    base = np.zeros((n, 3, 3), dtype=np.int64)
    base[:, 0, 0] = a % mod
    base[:, 0, 1] = (-b) % mod
    base[:, 0, 2] = 1 % mod
    base[:, 1, 0] = 1 % mod
    base[:, 2, 1] = 1 % mod
    acc = np.broadcast_to(np.eye(3, dtype=np.int64), (n, 3, 3)).copy() % m
    exps = k.copy()
    while np.any(exps):
        odd = (exps & 1).astype(bool)
        if odd.any():
            acc[odd] = np.matmul(acc[odd], base[odd]) % m[odd]
        exps >>= 1
        live = exps > 0
        if live.any():
            base[live] = np.matmul(base[live], base[live]) % m[live]
    return (acc[:, 0, 0] + acc[:, 1, 1] + acc[:, 2, 2]) % mod


if njit is not None:
    @njit(cache=True)
    def _mat3_mulmod(x, y, out, n):
        for i in range(3):
            for j in range(3):
                s = 0
                for t in range(3):
                    s = (s + x[i, t] * y[t, j]) % n
                out[i, j] = s

    @njit(cache=True)
    def _trace_power_numba(a, b, k, mod):
        size = a.shape[0]
        res = np.empty(size, dtype=np.int64)
        acc = np.empty((3, 3), dtype=np.int64)
        base = np.empty((3, 3), dtype=np.int64)
        tmp = np.empty((3, 3), dtype=np.int64)
        for idx in range(size):
            n = mod[idx]
            for i in range(3):
                for j in range(3):
                    acc[i, j] = 0
                    base[i, j] = 0
                acc[i, i] = 1 % n
            base[0, 0] = a[idx] % n
            base[0, 1] = (n - b[idx] % n) % n
            base[0, 2] = 1 % n
            base[1, 0] = 1 % n
            base[2, 1] = 1 % n
            e = k[idx]
            while e > 0:
                if e & 1:
                    _mat3_mulmod(acc, base, tmp, n)
                    acc[:, :] = tmp
                e >>= 1
                if e > 0:
                    _mat3_mulmod(base, base, tmp, n)
                    base[:, :] = tmp
            res[idx] = (acc[0, 0] + acc[1, 1] + acc[2, 2]) % n
        return res
else:  # pragma: no cover
    _trace_power_numba = None


def trace_power(a, b, k, mod, backend: str | None = None) -> np.ndarray:
    """s_k(a, b) mod ``mod`` for arrays of non-negative ``k``.

    ``backend`` is "numba", "numpy" or None (follow the env flag).
    """
    a, b, k, mod = np.broadcast_arrays(*(np.asarray(v, dtype=np.int64) for v in (a, b, k, mod)))
    shape = a.shape
    a, b, k, mod = (np.ascontiguousarray(v).ravel() for v in (a, b, k, mod))
    if mod.size and (mod.min() < 1 or mod.max() >= SMALL_MODULUS_LIMIT):
        raise ValueError("kernel moduli must lie in [1, 2**30)")
    if k.size and k.min() < 0:
        raise ValueError("kernel exponents must be non-negative")
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    if backend == "numba":
        if _trace_power_numba is None:  # pragma: no cover
            raise RuntimeError("numba backend unavailable")
        out = _trace_power_numba(a, b, k, mod)
    elif backend == "numpy":
        out = _trace_power_numpy(a, b, k, mod)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return out.reshape(shape)
