"""Number-theoretic helpers: primes, Schnorr-style groups, binomials and
polynomial interpolation over a prime field.

Every routine that needs randomness takes an explicit ``random.Random``;
nothing here touches global random state.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

import gmpy2

PRIMALITY_ROUNDS = 40
STRONG_PRIME_MIN_BITS = 64
MAX_PRIME_DRAWS = 500_000


class PrimeGenerationError(RuntimeError):
    """Raised when no prime of the requested shape turns up within the draw budget."""


class InterpolationError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return bool(gmpy2.is_prime(n, PRIMALITY_ROUNDS))


def _random_prime(lo: int, hi: int, rng: random.Random, safe: bool) -> int:
    """Uniformly drawn prime in [lo, hi); with ``safe`` the prime is 2p'+1, p' prime."""
    if safe:
        # p = 2p'+1 in [lo, hi)  <=>  p' in [ceil((lo-1)/2), ceil((hi-1)/2))
        plo, phi = -(-(lo - 1) // 2), -(-(hi - 1) // 2)
        if plo >= phi:
            raise PrimeGenerationError(f"empty range for safe prime in [{lo}, {hi})")
        for _ in range(MAX_PRIME_DRAWS):
            half = rng.randrange(plo, phi)
            # 2p'+1 is divisible by 3 whenever p' = 1 mod 3
            if half % 3 == 1 and half != 1:
                continue
            if is_prime(half) and is_prime(2 * half + 1):
                return 2 * half + 1
    else:
        if lo >= hi:
            raise PrimeGenerationError(f"empty range [{lo}, {hi})")
        for _ in range(MAX_PRIME_DRAWS):
            cand = rng.randrange(lo, hi)
            if is_prime(cand):
                return cand
    raise PrimeGenerationError(f"no prime found in [{lo}, {hi}) after {MAX_PRIME_DRAWS} draws")


def gen_prime(bits: int, strong: bool = False, rng: random.Random | None = None,
              at_least: int = 0) -> int:
    """Return a prime with exactly ``bits`` bits.

    With ``strong`` and ``bits >= 64`` the result is a safe prime p = 2p'+1.
    Below 64 bits the strong flag is ignored. ``at_least`` raises the lower
    end of the sampling range (used to push moduli above a floor).
    """
    if bits < 2:
        raise ValueError("bits must be >= 2")
    if rng is None:
        raise ValueError("an explicit rng is required")
    lo = max(1 << (bits - 1), at_least)
    hi = 1 << bits
    return _random_prime(lo, hi, rng, safe=strong and bits >= STRONG_PRIME_MIN_BITS)


@dataclass(frozen=True)
class DlpGroup:
    """Order-``Q`` subgroup of Z_q^* generated by ``g``."""

    Q: int
    q: int
    g: int

    def check(self) -> None:
        if not (is_prime(self.Q) and is_prime(self.q)):
            raise ValueError("Q and q must be prime")
        if (self.q - 1) % self.Q:
            raise ValueError("Q must divide q - 1")
        if self.g % self.q in (0, 1) or pow(self.g, self.Q, self.q) != 1:
            raise ValueError("g must have order Q modulo q")


def gen_dlp_group(lam: int, min_Q: int, rng: random.Random) -> DlpGroup:
    """Schnorr group with Q > min_Q and both moduli longer than lam/2 bits.

    Q is drawn first, then q = 2rQ + 1 over random r, then g = h^((q-1)/Q).
    """
    if min_Q < 2:
        raise ValueError("min_Q must be >= 2")
    qbits = max(lam // 2 + 1, min_Q.bit_length())
    Q = gen_prime(qbits, rng=rng, at_least=min_Q + 1)
    r_bits = max(8, lam // 2)
    for _ in range(MAX_PRIME_DRAWS):
        r = rng.randrange(1 << (r_bits - 1), 1 << r_bits)
        q = 2 * r * Q + 1
        if q.bit_length() > lam // 2 and is_prime(q):
            break
    else:
        raise PrimeGenerationError("could not find q = 2rQ + 1")
    cofactor = (q - 1) // Q
    while True:
        g = pow(rng.randrange(2, q - 1), cofactor, q)
        if g != 1:
            return DlpGroup(Q, q, g)


def binomial(k: int, j: int) -> int:
    if k < 0 or j < 0 or j > k:
        raise ValueError(f"binomial({k}, {j}) outside 0 <= j <= k")
    return math.comb(k, j)


def max_binomial(k: int) -> int:
    return math.comb(k, k // 2)


# -- instrumentation of group exponentiations -------------------------------

@dataclass
class ExpCounter:
    count: int = 0


_active_counter: contextvars.ContextVar[ExpCounter | None] = contextvars.ContextVar(
    "dvmss_exp_counter", default=None)


@contextlib.contextmanager
def count_group_exps() -> Iterator[ExpCounter]:
    """Count calls to :func:`gpow` made inside the block."""
    counter = ExpCounter()
    token = _active_counter.set(counter)
    try:
        yield counter
    finally:
        _active_counter.reset(token)


def gpow(base: int, exp: int, mod: int) -> int:
    """Modular exponentiation in the commitment group (counted)."""
    counter = _active_counter.get()
    if counter is not None:
        counter.count += 1
    return pow(base, exp, mod)


# -- polynomials over Z_Q ----------------------------------------------------

@dataclass(frozen=True)
class FieldPoly:
    """Polynomial over Z_modulus, coefficients lowest degree first."""

    coefficients: tuple[int, ...]
    modulus: int

    def __post_init__(self):
        coeffs = [c % self.modulus for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        # zero polynomial reported as -1
        return len(self.coefficients) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % self.modulus
        return acc


def _poly_mul_linear(poly: list[int], root: int, mod: int) -> list[int]:
    # poly * (x - root)
    out = [0] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i + 1] = (out[i + 1] + c) % mod
        out[i] = (out[i] - c * root) % mod
    return out


def lagrange_fit(points: Sequence[tuple[int, int]], Q: int) -> FieldPoly:
    """Unique polynomial of degree < len(points) through ``points`` over Z_Q."""
    xs = [x % Q for x, _ in points]
    if len(set(xs)) != len(xs):
        raise InterpolationError("interpolation nodes must be distinct modulo Q")
    if not points:
        return FieldPoly((), Q)
    master = [1]
    for x in xs:
        master = _poly_mul_linear(master, x, Q)
    result = [0] * len(xs)
    for i, (xi, (_, yi)) in enumerate(zip(xs, points)):
        # master / (x - xi) by synthetic division
        quot = [0] * len(xs)
        carry = 0
        for d in range(len(master) - 1, 0, -1):
            carry = (master[d] + carry * xi) % Q
            quot[d - 1] = carry
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                denom = denom * (xi - xj) % Q
        scale = yi * pow(denom, -1, Q) % Q
        for d in range(len(xs)):
            result[d] = (result[d] + scale * quot[d]) % Q
    return FieldPoly(tuple(result), Q)
