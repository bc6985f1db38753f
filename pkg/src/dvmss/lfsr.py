"""Third-order characteristic sequences s_k(a, b).

s_0 = 3, s_1 = a, s_2 = a^2 - 2b and s_{k+3} = a s_{k+2} - b s_{k+1} + s_k.
The k-th term is the trace of the k-th power of the companion matrix of
x^3 - a x^2 + b x - 1, so any index is reachable in O(log k) ring
multiplications, over a prime field or a composite modulus alike.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .modmath import is_prime


@dataclass(frozen=True)
class LfsrParams:
    a: int
    b: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "a", self.a % self.modulus)
        object.__setattr__(self, "b", self.b % self.modulus)


def is_irreducible_cubic(a: int, b: int, p: int) -> bool:
    """True iff x^3 - a x^2 + b x - 1 has no root in GF(p)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    a %= p
    b %= p
    # x = 0 is never a root (constant term is -1)
    for x in range(1, p):
        if (x * x * x - a * x * x + b * x - 1) % p == 0:
            return False
    return True


def _mat_mul(x, y, n):
    x0, x1, x2, x3, x4, x5, x6, x7, x8 = x
    y0, y1, y2, y3, y4, y5, y6, y7, y8 = y
    return (
        (x0 * y0 + x1 * y3 + x2 * y6) % n, (x0 * y1 + x1 * y4 + x2 * y7) % n, (x0 * y2 + x1 * y5 + x2 * y8) % n,
        (x3 * y0 + x4 * y3 + x5 * y6) % n, (x3 * y1 + x4 * y4 + x5 * y7) % n, (x3 * y2 + x4 * y5 + x5 * y8) % n,
        (x6 * y0 + x7 * y3 + x8 * y6) % n, (x6 * y1 + x7 * y4 + x8 * y7) % n, (x6 * y2 + x7 * y5 + x8 * y8) % n,
    )


def _companion_power(a: int, b: int, k: int, n: int):
    """Row-major 3x3 companion matrix of (a, b) raised to k >= 0, mod n."""
    acc = (1, 0, 0, 0, 1, 0, 0, 0, 1)
    base = (a % n, -b % n, 1, 1, 0, 0, 0, 1, 0)
    while k:
        if k & 1:
            acc = _mat_mul(acc, base, n)
        k >>= 1
        if k:
            base = _mat_mul(base, base, n)
    return acc


def _trace_and_cotrace(mat, n):
    m0, m1, m2, m3, m4, m5, m6, m7, m8 = mat
    trace = (m0 + m4 + m8) % n
    # det(M^k) = 1, so tr(M^-k) = tr(adj M^k) = sum of principal 2x2 minors
    cotrace = (m0 * m4 - m1 * m3 + m0 * m8 - m2 * m6 + m4 * m8 - m5 * m7) % n
    return trace, cotrace


def seq_eval(params: LfsrParams, k: int) -> int:
    """s_k(a, b) mod modulus for any signed k; s_{-k}(a, b) = s_k(b, a)."""
    a, b, n = params.a, params.b, params.modulus
    if k < 0:
        a, b, k = b, a, -k
    if k == 0:
        return 3 % n
    return _trace_and_cotrace(_companion_power(a, b, k, n), n)[0]


def seq_pair(params: LfsrParams, e: int) -> tuple[int, int]:
    """(s_e, s_{-e}) from a single matrix power."""
    n = params.modulus
    if e == 0:
        return 3 % n, 3 % n
    pos, neg = _trace_and_cotrace(_companion_power(params.a, params.b, abs(e), n), n)
    return (pos, neg) if e > 0 else (neg, pos)


def seq_eval_batch(a, b, k, modulus, backend: str | None = None) -> np.ndarray:
    """Elementwise s_k(a, b) mod modulus over arrays; k may be negative.

    Moduli below 2**30 go through the compiled kernel, larger ones fall back
    to the exact big-integer path (object dtype result).
    """
    a, b, k, modulus = np.broadcast_arrays(*(np.asarray(v) for v in (a, b, k, modulus)))
    if modulus.size and int(modulus.max()) < _kernels.SMALL_MODULUS_LIMIT:
        neg = k < 0
        aa = np.where(neg, b, a).astype(np.int64)
        bb = np.where(neg, a, b).astype(np.int64)
        return _kernels.trace_power(aa, bb, np.abs(k).astype(np.int64),
                                    modulus.astype(np.int64), backend=backend)
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = seq_eval(LfsrParams(int(a[idx]), int(b[idx]), int(modulus[idx])), int(k[idx]))
    return out
