"""Nonhomogeneous linear recursions with binomial coefficients over Z_Q.

NLR1:  sum_j C(k,j) u_{n+k-j}          = (-1)^n c
NLR2:  sum_j C(k,j) (-1)^j u_{n+k-j}   = c

Solutions have the closed forms u_n = p(n)(-1)^n (NLR1) and u_n = p(n)
(NLR2) with deg p <= k. Indices here are absolute sequence positions; the
participant numbering lives in :mod:`dvmss.scheme`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .modmath import FieldPoly, binomial, lagrange_fit


class Variant(enum.IntEnum):
    NLR1 = 1
    NLR2 = 2


def coefficients(variant: Variant, k: int, Q: int) -> list[int]:
    """Recursion coefficients a_0..a_k, where a_j multiplies u_{n+k-j}."""
    if variant == Variant.NLR1:
        return [binomial(k, j) % Q for j in range(k + 1)]
    return [(-1) ** j * binomial(k, j) % Q for j in range(k + 1)]


def forcing(variant: Variant, c: int, n: int, Q: int) -> int:
    """Right-hand side at offset n; the sign (-1)^n is Q-1 for odd n."""
    if variant == Variant.NLR1 and n % 2:
        return (Q - c) % Q
    return c % Q


def sign(variant: Variant, n: int, Q: int) -> int:
    """Factor relating u_n to the closed-form polynomial value p(n)."""
    return Q - 1 if variant == Variant.NLR1 and n % 2 else 1


@dataclass(frozen=True)
class NlrSpec:
    variant: Variant
    k: int
    initials: tuple[int, ...]
    c: int
    Q: int

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "initials", tuple(x % self.Q for x in self.initials))
        if self.k < 1:
            raise ValueError("degree k must be >= 1")
        if len(self.initials) != self.k:
            raise ValueError(f"need exactly k={self.k} initial values")

    def validate(self) -> None:
        """Enforce the constraints the sharing schemes rely on."""
        if any(self.Q <= binomial(self.k, j) for j in range(self.k + 1)):
            raise ValueError(f"Q={self.Q} must exceed every C({self.k}, j)")
        if not 0 < self.c < self.Q:
            raise ValueError("c must lie in (0, Q)")
        if any(x == 0 for x in self.initials):
            raise ValueError("initial values must be nonzero mod Q")


def extend_forward(variant: Variant, k: int, c: int, Q: int,
                   window: Sequence[int], start: int) -> int:
    """u_{start+k} from window = u_start .. u_{start+k-1}."""
    if len(window) != k:
        raise ValueError("window must hold exactly k values")
    a = coefficients(variant, k, Q)
    acc = forcing(variant, c, start, Q)
    for j in range(1, k + 1):
        acc -= a[j] * window[k - j]
    # a_0 = 1 in both variants
    return acc % Q


def nlr_extend_back(variant: Variant, k: int, c: int, Q: int,
                    window: Sequence[int], start: int) -> int:
    """u_{start-1} from window = u_start .. u_{start+k-1}."""
    if len(window) != k:
        raise ValueError("window must hold exactly k values")
    n = start - 1
    a = coefficients(variant, k, Q)
    acc = forcing(variant, c, n, Q)
    for j in range(k):
        acc -= a[j] * window[k - 1 - j]
    # a_k is 1 (NLR1) or (-1)^k (NLR2), its own inverse either way
    return acc * a[k] % Q


def nlr_generate(spec: NlrSpec, length: int) -> list[int]:
    if length < spec.k:
        raise ValueError("length must be at least k")
    k, Q = spec.k, spec.Q
    u = list(spec.initials)
    for n in range(length - k):
        u.append(extend_forward(spec.variant, k, spec.c, Q, u[n:n + k], n))
    return u


def complete_from_window(variant: Variant, k: int, c: int, Q: int,
                         window: Sequence[int], start: int,
                         indices: Iterable[int]) -> dict[int, int]:
    """Values at ``indices`` reached by stepping the recursion out of a window."""
    wanted = sorted(set(indices))
    known = {start + t: v % Q for t, v in enumerate(window)}
    if not wanted:
        return {}
    lo, hi = min(wanted[0], start), max(wanted[-1], start + k - 1)
    if lo < 0:
        raise ValueError("sequence indices are non-negative")
    for n in range(start + k, hi + 1):
        known[n] = extend_forward(variant, k, c, Q, [known[n - k + t] for t in range(k)], n - k)
    for n in range(start - 1, lo - 1, -1):
        known[n] = nlr_extend_back(variant, k, c, Q, [known[n + 1 + t] for t in range(k)], n + 1)
    return {n: known[n] for n in wanted}


def nlr_fit(variant: Variant, k: int, Q: int, points: Sequence[tuple[int, int]]) -> FieldPoly:
    """Closed-form polynomial p through k+1 sequence points (index, u_index)."""
    if len(points) != k + 1:
        raise ValueError(f"need exactly k+1={k + 1} points, got {len(points)}")
    if len({n for n, _ in points}) != len(points):
        raise ValueError("duplicate sequence indices")
    return lagrange_fit([(n, v * sign(variant, n, Q) % Q) for n, v in points], Q)


def nlr_value(variant: Variant, poly: FieldPoly, n: int) -> int:
    return poly(n) * sign(variant, n, poly.modulus) % poly.modulus


def residual(variant: Variant, k: int, c: int, Q: int, u: Sequence[int], n: int) -> int:
    """Left side minus right side of the recursion at offset n (0 when satisfied)."""
    a = coefficients(variant, k, Q)
    lhs = sum(a[j] * u[n + k - j] for j in range(k + 1))
    return (lhs - forcing(variant, c, n, Q)) % Q
