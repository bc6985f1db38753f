"""Shared builders for the test suite."""

from __future__ import annotations

import random
from dataclasses import dataclass

from dvmss.modmath import DlpGroup, is_prime
from dvmss.pkc import pkc_keygen
from dvmss.scheme import DealerParams, ParticipantRecord, deal, dealer_setup, extract_subshadow


@dataclass
class Deal:
    params: DealerParams
    state: object
    bulletin: object
    privs: dict          # id -> private key
    secrets: list

    def shares(self, bulletin=None):
        b = bulletin or self.bulletin
        return {p.index: extract_subshadow(self.params, self.privs[p.id], b, p.index)
                for p in b.participants}


def desk_group(Q: int, rng: random.Random) -> DlpGroup:
    """Schnorr group of prime order Q (no bit-length floor, for sweep tests)."""
    assert is_prime(Q)
    r = 1
    while not is_prime(2 * r * Q + 1):
        r += 1
    q = 2 * r * Q + 1
    while True:
        g = pow(rng.randrange(2, q - 1), (q - 1) // Q, q)
        if g != 1:
            return DlpGroup(Q, q, g)


def desk_params(Q: int, seed: int = 0, lam: int = 24) -> DealerParams:
    rng = random.Random(seed)
    return DealerParams(lam, 1 << (lam - 2), desk_group(Q, rng))


def enroll(params: DealerParams, m: int, rng: random.Random, prefix: str = "P"):
    records, privs = [], {}
    lam = max(params.lam, 24)
    for i in range(m):
        pub, priv = pkc_keygen(lam, max(params.N, params.Q), f"{prefix}{i + 1}", rng)
        records.append(ParticipantRecord(pub))
        privs[pub.id] = priv
    return records, privs


def make_deal(scheme: int, k: int, m: int, l: int, seed: int, lam: int = 64,
              params: DealerParams | None = None) -> Deal:
    rng = random.Random(seed)
    if params is None:
        params = dealer_setup(lam, k, rng)
    records, privs = enroll(params, m, rng)
    secrets = [rng.randrange(1, params.Q) for _ in range(l)]
    state, bulletin = deal(params, scheme, k, records, secrets, rng)
    return Deal(params, state, bulletin, privs, secrets)
