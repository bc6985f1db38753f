"""LFSR public-key cryptosystem over Z_N, N = pq.

Encryption of a pair (m1, m2) is (s_e(m1, m2), s_{-e}(m1, m2)); decryption
evaluates the same pair at the private exponent. The diagonal form
H = s_e(u, u) is the single-value variant the sharing schemes use.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .lfsr import LfsrParams, seq_eval, seq_pair
from .modmath import PrimeGenerationError, gen_prime

MAX_KEYGEN_ATTEMPTS = 1000


@dataclass(frozen=True)
class PkcPublicKey:
    id: str
    e: int
    N: int


@dataclass(frozen=True)
class PkcPrivateKey:
    id: str
    p: int
    q: int
    e: int
    d: int

    @property
    def N(self) -> int:
        return self.p * self.q

    @property
    def delta(self) -> int:
        """Period of an irreducible characteristic polynomial mod N."""
        p, q = self.p, self.q
        return (p * p + p + 1) * (q * q + q + 1)

    @property
    def exponent_modulus(self) -> int:
        """Exponent of every root group reachable by a norm-1 cubic mod p and mod q.

        Roots of x^3 - a x^2 + b x - 1 live in GF(p), GF(p^2) or GF(p^3), so
        their orders divide p^2 - 1 or p^3 - 1. Inverting e modulo this lcm
        (a multiple of delta) makes decryption exact for every message,
        including the diagonal messages whose polynomial always has the root 1.
        """
        p, q = self.p, self.q
        return math.lcm(p * p - 1, p ** 3 - 1, q * q - 1, q ** 3 - 1, self.delta)

    @property
    def public(self) -> PkcPublicKey:
        return PkcPublicKey(self.id, self.e, self.N)


def exponent_is_admissible(e: int, p: int, q: int) -> bool:
    return all(math.gcd(e, r ** j - 1) == 1 for r in (p, q) for j in (2, 3))


def private_key_from_primes(id: str, p: int, q: int, e: int) -> PkcPrivateKey:
    if p < q:
        p, q = q, p
    if not exponent_is_admissible(e, p, q):
        raise ValueError("e must be coprime to p^2-1, p^3-1, q^2-1 and q^3-1")
    key = PkcPrivateKey(id, p, q, e, 0)
    return PkcPrivateKey(id, p, q, e, pow(e, -1, key.exponent_modulus))


def pkc_keygen(lam: int, min_N: int, id: str, rng: random.Random,
               strong: bool = True) -> tuple[PkcPublicKey, PkcPrivateKey]:
    """Key pair with an N of about ``lam`` bits strictly above ``min_N``."""
    if lam < 8:
        raise ValueError("lambda must be at least 8")
    half = lam // 2
    top = 1 << half
    for _ in range(MAX_KEYGEN_ATTEMPTS):
        p = gen_prime(half, strong, rng)
        # choose q < p with p*q > min_N by restricting q's range
        q_lo = max(1 << (half - 1), min_N // p + 1)
        if q_lo >= min(p, top):
            continue
        try:
            q = gen_prime(half, strong, rng, at_least=q_lo)
        except PrimeGenerationError:
            continue
        if q >= p:
            if q == p:
                continue
            p, q = q, p
        if p * q <= min_N:
            continue
        delta = (p * p + p + 1) * (q * q + q + 1)
        while True:
            e = rng.randrange(2, delta)
            if exponent_is_admissible(e, p, q):
                break
        priv = private_key_from_primes(id, p, q, e)
        return priv.public, priv
    raise PrimeGenerationError(f"no {lam}-bit modulus above {min_N} after {MAX_KEYGEN_ATTEMPTS} attempts")


def _check_message(x: int, N: int) -> None:
    if not 0 < x < N:
        raise ValueError(f"message component {x} outside (0, N)")


def pkc_encrypt(pub: PkcPublicKey, m1: int, m2: int) -> tuple[int, int]:
    _check_message(m1, pub.N)
    _check_message(m2, pub.N)
    return seq_pair(LfsrParams(m1, m2, pub.N), pub.e)


def pkc_decrypt(priv: PkcPrivateKey, c1: int, c2: int) -> tuple[int, int]:
    return seq_pair(LfsrParams(c1, c2, priv.N), priv.d)


def encrypt_diagonal(pub: PkcPublicKey, u: int) -> int:
    """H = s_e(u, u) mod N, which also equals s_{-e}(u, u)."""
    _check_message(u, pub.N)
    return seq_eval(LfsrParams(u, u, pub.N), pub.e)


def decrypt_diagonal(priv: PkcPrivateKey, H: int) -> int:
    return seq_eval(LfsrParams(H, H, priv.N), priv.d)


def key_size_report(pub: PkcPublicKey, priv: PkcPrivateKey) -> dict[str, int]:
    return {
        "N_bits": pub.N.bit_length(),
        "e_bits": pub.e.bit_length(),
        "d_bits": priv.d.bit_length(),
        "delta_bits": priv.delta.bit_length(),
        "exponent_modulus_bits": priv.exponent_modulus.bit_length(),
    }
