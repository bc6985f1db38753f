"""Dishonest-dealer harness.

A cheating dealer swaps one or more participants' subshadows for fresh
values, encrypting each replacement and committing to it so that the
participant's own validity check still passes. Validity-only auditing
(comparing each share against its commitment) accepts such a bulletin;
the consistency windows and the commitment chain reject it.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .pkc import encrypt_diagonal
from .scheme import AuditReport, Bulletin, DealerParams, DealerState, Share, verify_bulletin, verify_share


class ForgeryMode(enum.Enum):
    SUBSTITUTE_SUBSHADOW = "substitute-subshadow"


@dataclass(frozen=True)
class ForgedBulletin:
    bulletin: Bulletin
    forged_indices: tuple[int, ...]
    forgery_mode: ForgeryMode = ForgeryMode.SUBSTITUTE_SUBSHADOW


def forge_deal(state: DealerState, target: int | Sequence[int], rng: random.Random) -> ForgedBulletin:
    """Replace the subshadow of each target participant by a random u' != u."""
    targets = [target] if isinstance(target, int) else list(target)
    params = state.params
    Q, q, g = params.Q, params.q, params.g
    records = {r.index: r for r in state.records}
    entries = {p.index: p for p in state.bulletin.participants}
    for i in targets:
        if i not in records or i not in entries:
            raise KeyError(f"participant {i} not enrolled")
        true_u = state.u(i - 1)
        fake = true_u
        while fake == true_u:
            fake = rng.randrange(1, Q)
        pub = records[i].public
        entries[i] = replace(entries[i], H=encrypt_diagonal(pub, fake), T=pow(g, fake, q))
    forged = replace(state.bulletin,
                     participants=tuple(entries[p.index] for p in state.bulletin.participants))
    return ForgedBulletin(forged, tuple(sorted(set(targets))))


def audit_validity_only(params: DealerParams, bulletin: Bulletin, shares: Iterable[Share]) -> bool:
    """Per-share g^u == T checks and nothing else."""
    return all(verify_share(params, bulletin, s) for s in shares)


def audit_full(params: DealerParams, bulletin: Bulletin, shares: Iterable[Share]) -> AuditReport:
    report = verify_bulletin(params, bulletin)
    report.share_failures = [s.index for s in shares if not verify_share(params, bulletin, s)]
    return report

