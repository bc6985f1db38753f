"""Dynamic verifiable multi-secret sharing (Schemes 1 and 2).

Scheme 1 draws subshadows from an NLR1 sequence, Scheme 2 from NLR2; the
two differ only in the recursion and hence in the verification equation.

Numbering: participant number ``i`` (1-based, carried by shares and board
entries) holds the sequence term u_{i-1}. Sequence indices are allocated
monotonically: a fresh deal uses 0..m-1 for subshadows, m..m+l-1 for
secret masks and m+l for the published tail; later additions take fresh
indices past everything previously allocated, and removed indices are
never handed out again.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .modmath import DlpGroup, binomial, gen_dlp_group, gen_prime, gpow, max_binomial
from .nlr import NlrSpec, Variant, complete_from_window, nlr_fit, nlr_generate, nlr_value, residual
from .pkc import PkcPrivateKey, PkcPublicKey, decrypt_diagonal, encrypt_diagonal, pkc_keygen

MIN_LAMBDA = 16
MAX_DEAL_ATTEMPTS = 100


@dataclass(frozen=True)
class DealerParams:
    lam: int
    N: int
    group: DlpGroup

    @property
    def Q(self) -> int:
        return self.group.Q

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def g(self) -> int:
        return self.group.g


@dataclass(frozen=True)
class ParticipantRecord:
    public: PkcPublicKey
    index: int = 0

    @property
    def id(self) -> str:
        return self.public.id


@dataclass(frozen=True)
class BoardEntry:
    """Public material for one participant: key, encrypted subshadow, commitment."""

    index: int
    id: str
    e: int
    N: int
    H: int
    T: int


@dataclass(frozen=True)
class SecretEntry:
    mask_index: int
    y: int


@dataclass(frozen=True)
class Bulletin:
    scheme: int
    k: int
    c: int
    tail: int
    tail_index: int
    participants: tuple[BoardEntry, ...]
    secrets: tuple[SecretEntry, ...]

    @property
    def variant(self) -> Variant:
        return Variant(self.scheme)

    @property
    def m(self) -> int:
        return len(self.participants)

    @property
    def l(self) -> int:
        return len(self.secrets)

    @property
    def H(self) -> list[int]:
        return [p.H for p in self.participants]

    @property
    def T(self) -> list[int]:
        return [p.T for p in self.participants]

    @property
    def y(self) -> list[int]:
        return [s.y for s in self.secrets]

    @property
    def participant_ids(self) -> list[str]:
        return [p.id for p in self.participants]

    def entry(self, index: int) -> BoardEntry | None:
        for p in self.participants:
            if p.index == index:
                return p
        return None

    def commitments(self) -> dict[int, int]:
        """Published T values keyed by sequence index."""
        return {p.index - 1: p.T for p in self.participants}


@dataclass(frozen=True)
class Share:
    index: int
    value: int


@dataclass(frozen=True)
class DealerState:
    params: DealerParams
    spec: NlrSpec
    records: tuple[ParticipantRecord, ...]
    secrets: tuple[int, ...]
    bulletin: Bulletin
    next_index: int
    sequence: tuple[int, ...] = field(repr=False, compare=False, default=())

    def __post_init__(self):
        if len(self.sequence) < self.next_index:
            object.__setattr__(self, "sequence", tuple(nlr_generate(self.spec, max(self.next_index, self.spec.k))))

    def u(self, n: int) -> int:
        if n >= len(self.sequence):
            object.__setattr__(self, "sequence", tuple(nlr_generate(self.spec, n + 1)))
        return self.sequence[n]


class ReconstructionError(ValueError):
    pass


class CheatingDetected(ReconstructionError):
    def __init__(self, indices: Sequence[int]):
        self.indices = sorted(indices)
        super().__init__(f"shares failed validity: participants {self.indices}")


# -- setup -------------------------------------------------------------------

def dealer_setup(lam: int, k_max: int, rng: random.Random) -> DealerParams:
    """Public parameters (lambda, N, Q, q, g) with Q above every C(k_max, j)."""
    if lam < MIN_LAMBDA:
        raise ValueError(f"lambda must be at least {MIN_LAMBDA}")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    half = lam // 2
    while True:
        p0 = gen_prime(half, strong=True, rng=rng)
        q0 = gen_prime(half, strong=True, rng=rng)
        if p0 != q0:
            break
    group = gen_dlp_group(lam, max(2, max_binomial(k_max)), rng)
    return DealerParams(lam, p0 * q0, group)


def participant_enroll(params: DealerParams, id: str, rng: random.Random,
                       index: int = 0) -> tuple[ParticipantRecord, PkcPrivateKey]:
    pub, priv = pkc_keygen(params.lam, params.N, id, rng)
    return ParticipantRecord(pub, index), priv


# -- construction --------------------------------------------------------------

def _check_threshold(Q: int, k: int) -> None:
    if any(Q <= binomial(k, j) for j in range(k + 1)):
        raise ValueError(f"Q={Q} too small for threshold {k}; rerun dealer setup")


def _entry(params: DealerParams, record: ParticipantRecord, index: int, u: int) -> BoardEntry:
    pub = record.public
    return BoardEntry(index, pub.id, pub.e, pub.N, encrypt_diagonal(pub, u), gpow(params.g, u, params.q))


def _random_spec(variant: Variant, k: int, Q: int, rng: random.Random) -> NlrSpec:
    initials = tuple(rng.randrange(1, Q) for _ in range(k))
    return NlrSpec(variant, k, initials, rng.randrange(1, Q), Q)


def deal(params: DealerParams, scheme: int, k: int, records: Sequence[ParticipantRecord],
         secrets: Sequence[int], rng: random.Random,
         sequence: NlrSpec | None = None) -> tuple[DealerState, Bulletin]:
    """Construction phase: subshadows, encryptions, commitments and masks.

    Performs exactly one commitment-group exponentiation per participant.
    ``sequence`` pins the NLR instead of drawing one (tests, replays).
    """
    variant = Variant(scheme)
    m, l, Q = len(records), len(secrets), params.Q
    if not 1 <= k < m:
        raise ValueError("threshold must satisfy 1 <= k < m")
    if l < 1:
        raise ValueError("need at least one secret")
    _check_threshold(Q, k)
    if any(not 0 < s < Q for s in secrets):
        raise ValueError("secrets must lie in (0, Q)")
    ids = [r.id for r in records]
    if len(set(ids)) != m:
        raise ValueError("participant ids must be unique")
    for r in records:
        if r.public.N <= max(Q, params.N):
            raise ValueError(f"participant {r.id}: modulus must exceed both Q and the dealer floor N")

    for _ in range(MAX_DEAL_ATTEMPTS):
        spec = sequence if sequence is not None else _random_spec(variant, k, Q, rng)
        if spec.variant != variant or spec.k != k or spec.Q != Q:
            raise ValueError("supplied sequence does not match scheme, k or Q")
        spec.validate()
        u = nlr_generate(spec, m + l + 1)
        if all(u[n] for n in range(m)):
            break
        if sequence is not None:
            raise ValueError("supplied sequence gives a zero subshadow")
    else:  # pragma: no cover - probability m/Q per attempt
        raise RuntimeError("could not draw a sequence with nonzero subshadows")

    numbered = tuple(replace(r, index=i + 1) for i, r in enumerate(records))
    entries = tuple(_entry(params, r, r.index, u[r.index - 1]) for r in numbered)
    masks = tuple(SecretEntry(m + i, (s - u[m + i]) % Q) for i, s in enumerate(secrets))
    bulletin = Bulletin(int(variant), k, spec.c, u[m + l], m + l, entries, masks)
    state = DealerState(params, spec, numbered, tuple(secrets), bulletin, m + l + 1, tuple(u))
    return state, bulletin


# -- verification ----------------------------------------------------------------

def extract_subshadow(params: DealerParams, priv: PkcPrivateKey, bulletin: Bulletin, i: int) -> Share:
    entry = bulletin.entry(i)
    if entry is None:
        raise IndexError(f"no participant {i} on the bulletin")
    return Share(i, decrypt_diagonal(priv, entry.H) % params.Q)


def verify_share(params: DealerParams, bulletin: Bulletin, share: Share) -> bool:
    entry = bulletin.entry(share.index)
    if entry is None:
        return False
    return gpow(params.g, share.value, params.q) == entry.T


def _window_holds(params: DealerParams, bulletin: Bulletin, known: dict[int, int], start: int) -> bool:
    k, q = bulletin.k, params.q
    variant = bulletin.variant
    lhs = 1
    for j in range(k + 1):
        exp = binomial(k, j) if variant == Variant.NLR1 else (-1) ** j * binomial(k, j)
        lhs = lhs * gpow(known[start + k - j], exp, q) % q
    rhs_exp = -bulletin.c if variant == Variant.NLR1 and start % 2 else bulletin.c
    return lhs == gpow(params.g, rhs_exp, q)


@dataclass
class WindowResult:
    start: int
    k: int
    ok: bool

    @property
    def indices(self) -> list[int]:
        """Participant numbers covered by the window."""
        return list(range(self.start + 1, self.start + self.k + 2))


@dataclass
class ChainResult:
    index: int
    label: str
    ok: bool


@dataclass
class AuditReport:
    windows: list[WindowResult] = field(default_factory=list)
    chain: list[ChainResult] = field(default_factory=list)
    entry_errors: list[str] = field(default_factory=list)
    share_failures: list[int] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (not self.entry_errors and not self.share_failures
                and all(w.ok for w in self.windows) and all(c.ok for c in self.chain))

    @property
    def failing_windows(self) -> list[WindowResult]:
        return [w for w in self.windows if not w.ok]

    def lines(self) -> list[str]:
        out = [f"result: {'PASS' if self.ok else 'FAIL'}"]
        out += [f"entry: {e}" for e in self.entry_errors]
        for w in self.windows:
            out.append(f"window {w.start} participants {w.indices[0]}..{w.indices[-1]}: "
                       f"{'pass' if w.ok else 'FAIL'}")
        for c in self.chain:
            out.append(f"chain {c.label} at sequence index {c.index}: {'pass' if c.ok else 'FAIL'}")
        out += [f"share {i}: FAIL" for i in self.share_failures]
        out += [f"note: {n}" for n in self.notes]
        return out


def _entry_errors(params: DealerParams, bulletin: Bulletin) -> tuple[list[str], set[int]]:
    Q, q = params.Q, params.q
    errors, bad = [], set()
    for p in bulletin.participants:
        if not 1 <= p.T < q:
            errors.append(f"T_{p.index} outside [1, q)")
            bad.add(p.index - 1)
        if not 0 <= p.H < p.N:
            errors.append(f"H_{p.index} outside [0, N_{p.index})")
    for i, s in enumerate(bulletin.secrets, 1):
        if not 0 <= s.y < Q:
            errors.append(f"y_{i} outside [0, Q)")
    if not 0 < bulletin.c < Q:
        errors.append("c outside (0, Q)")
    if not 0 <= bulletin.tail < Q:
        errors.append("tail outside [0, Q)")
    if len({p.index for p in bulletin.participants}) != bulletin.m:
        errors.append("duplicate participant numbers")
    return errors, bad


def _derive_chain(params: DealerParams, bulletin: Bulletin, known: dict[int, int],
                  upto: int) -> dict[int, int] | None:
    """g^{u_n} for n in [0, upto], stepped through the recursion in the exponent
    from the first run of k consecutive published commitments."""
    k, q, g = bulletin.k, params.q, params.g
    variant = bulletin.variant
    anchor = next((n for n in sorted(known) if all(n + t in known for t in range(k))), None)
    if anchor is None:
        return None
    a = [binomial(k, j) if variant == Variant.NLR1 else (-1) ** j * binomial(k, j)
         for j in range(k + 1)]
    signed_rhs = lambda n: -bulletin.c if variant == Variant.NLR1 and n % 2 else bulletin.c  # noqa: E731
    chain = {anchor + t: known[anchor + t] for t in range(k)}
    for n in range(anchor + k, upto + 1):
        acc = gpow(g, signed_rhs(n - k), q)
        for j in range(1, k + 1):
            acc = acc * gpow(chain[n - j], -a[j], q) % q
        chain[n] = acc
    for n in range(anchor - 1, -1, -1):
        acc = gpow(g, signed_rhs(n), q)
        for j in range(k):
            acc = acc * gpow(chain[n + k - j], -a[j], q) % q
        chain[n] = gpow(acc, a[k], q)  # a_k = +-1
    return chain


def verify_bulletin(params: DealerParams, bulletin: Bulletin) -> AuditReport:
    """Public audit: entry ranges, every complete consistency window, and the
    commitment chain binding the tail and any commitment no window covers."""
    report = AuditReport()
    report.entry_errors, bad = _entry_errors(params, bulletin)
    k = bulletin.k
    known = bulletin.commitments()
    good = {n: t for n, t in known.items() if n not in bad}
    covered = set()
    top = max(known, default=-1)
    for start in range(0, top - k + 1):
        span = range(start, start + k + 1)
        if all(n in known for n in span):
            ok = all(n in good for n in span) and _window_holds(params, bulletin, good, start)
            report.windows.append(WindowResult(start, k, ok))
            covered.update(span)
    if not report.windows:
        report.notes.append("no windows checkable")
    chain = _derive_chain(params, bulletin, good, max(top, bulletin.tail_index))
    if chain is None:
        report.notes.append(f"no run of {k} consecutive commitments; chain unchecked")
        return report
    for n in sorted(good):
        if n not in covered:
            report.chain.append(ChainResult(n, "T", chain[n] == good[n]))
    tail_ok = gpow(params.g, bulletin.tail, params.q) == chain[bulletin.tail_index]
    report.chain.append(ChainResult(bulletin.tail_index, "tail", tail_ok))
    return report


def verify_participant(params: DealerParams, bulletin: Bulletin, share: Share) -> bool:
    """One participant's check: own validity plus one consistency window.

    Cost is k+3 group exponentiations: the validity check, k+1 window
    factors and the right-hand side. Participants whose index sits in no
    complete window fall back to the chain check (more expensive).
    """
    if not verify_share(params, bulletin, share):
        return False
    known = {n: t for n, t in bulletin.commitments().items() if 1 <= t < params.q}
    n, k = share.index - 1, bulletin.k
    for start in range(max(0, n - k), n + 1):
        if all(start + t in known for t in range(k + 1)):
            return _window_holds(params, bulletin, known, start)
    chain = _derive_chain(params, bulletin, known, max(max(known), bulletin.tail_index))
    return chain is not None and chain[n] == known[n]


# -- reconstruction ------------------------------------------------------------

def _valid_shares(params: DealerParams, bulletin: Bulletin, shares: Iterable[Share],
                  check: bool) -> list[Share]:
    by_index: dict[int, Share] = {}
    for s in shares:
        by_index.setdefault(s.index, s)
    chosen = [by_index[i] for i in sorted(by_index)]
    if check:
        bad = [s.index for s in chosen if not verify_share(params, bulletin, s)]
        if bad:
            raise CheatingDetected(bad)
    if len(chosen) < bulletin.k:
        raise ReconstructionError(f"need {bulletin.k} valid shares, got {len(chosen)}")
    return chosen


def _unmask(bulletin: Bulletin, u_at: dict[int, int], Q: int) -> list[int]:
    return [(s.y + u_at[s.mask_index]) % Q for s in bulletin.secrets]


def reconstruct_method1(params: DealerParams, bulletin: Bulletin, shares: Iterable[Share],
                        check: bool = True) -> list[int]:
    """Interpolate the closed form through k shares plus the published tail."""
    Q, k = params.Q, bulletin.k
    chosen = _valid_shares(params, bulletin, shares, check)[:k]
    points = [(s.index - 1, s.value % Q) for s in chosen] + [(bulletin.tail_index, bulletin.tail)]
    poly = nlr_fit(bulletin.variant, k, Q, points)
    u_at = {s.mask_index: nlr_value(bulletin.variant, poly, s.mask_index) for s in bulletin.secrets}
    return _unmask(bulletin, u_at, Q)


def reconstruct_method2(params: DealerParams, bulletin: Bulletin, shares: Iterable[Share],
                        check: bool = True) -> list[int]:
    """Step the recursion outward from k shares with consecutive indices."""
    Q, k = params.Q, bulletin.k
    chosen = _valid_shares(params, bulletin, shares, check)
    idx = [s.index for s in chosen]
    for pos in range(len(chosen) - k + 1):
        if idx[pos + k - 1] - idx[pos] == k - 1:
            run = chosen[pos:pos + k]
            break
    else:
        raise ReconstructionError("method 2 needs k shares with consecutive indices")
    u_at = complete_from_window(bulletin.variant, k, bulletin.c, Q,
                                [s.value % Q for s in run], run[0].index - 1,
                                [s.mask_index for s in bulletin.secrets])
    return _unmask(bulletin, u_at, Q)


@dataclass(frozen=True)
class SweepCandidate:
    value: int
    secrets: tuple[int, ...]
    consistent: bool


def privacy_sweep(params: DealerParams, bulletin: Bulletin, shares: Sequence[Share],
                  probe_index: int) -> list[SweepCandidate]:
    """Complete k-1 shares with every candidate subshadow for participant ``probe_index``.

    Each candidate is pushed through the Method 1 interpolation (k-1 shares,
    the candidate and the public tail) and flagged consistent when the
    completed sequence satisfies the recursion with the published c.
    """
    Q, k = params.Q, bulletin.k
    if len(shares) != k - 1:
        raise ValueError("sweep expects exactly k-1 shares")
    if probe_index in {s.index for s in shares}:
        raise ValueError("probe index already held")
    variant = bulletin.variant
    masks = [s.mask_index for s in bulletin.secrets]
    top = max([bulletin.tail_index, probe_index - 1, *masks, *(s.index - 1 for s in shares)])
    base = [(s.index - 1, s.value % Q) for s in shares] + [(bulletin.tail_index, bulletin.tail)]
    out = []
    for cand in range(Q):
        poly = nlr_fit(variant, k, Q, base + [(probe_index - 1, cand)])
        seq = [nlr_value(variant, poly, n) for n in range(top + 1)]
        consistent = all(residual(variant, k, bulletin.c, Q, seq, n) == 0 for n in range(top + 1 - k))
        secrets = tuple((s.y + seq[s.mask_index]) % Q for s in bulletin.secrets)
        out.append(SweepCandidate(cand, secrets, consistent))
    return out


# -- dynamism --------------------------------------------------------------------

def _republish(state: DealerState, **changes) -> tuple[DealerState, Bulletin]:
    bulletin = replace(state.bulletin, **changes.pop("bulletin", {}))
    new = replace(state, bulletin=bulletin, **changes)
    return new, bulletin


def add_participant(state: DealerState, record: ParticipantRecord) -> tuple[DealerState, Bulletin]:
    """Enroll a newcomer at the next unallocated sequence index.

    Indices whose term is zero are skipped (retired) because a zero
    subshadow cannot be encrypted.
    """
    if record.id in {r.id for r in state.records}:
        raise ValueError(f"participant id {record.id!r} already enrolled")
    if record.public.N <= max(state.params.Q, state.params.N):
        raise ValueError("participant modulus must exceed both Q and the dealer floor N")
    n = state.next_index
    while state.u(n) == 0:
        n += 1
    record = replace(record, index=n + 1)
    entry = _entry(state.params, record, n + 1, state.u(n))
    return _republish(state, records=state.records + (record,), next_index=n + 1,
                      bulletin={"participants": state.bulletin.participants + (entry,)})


def remove_participant(state: DealerState, id: str) -> tuple[DealerState, Bulletin]:
    if id not in {r.id for r in state.records}:
        raise KeyError(f"unknown participant {id!r}")
    records = tuple(r for r in state.records if r.id != id)
    entries = tuple(p for p in state.bulletin.participants if p.id != id)
    return _republish(state, records=records, bulletin={"participants": entries})


def _check_secret(state: DealerState, value: int) -> None:
    if not 0 < value < state.params.Q:
        raise ValueError("secret must lie in (0, Q)")


def add_secret(state: DealerState, value: int) -> tuple[DealerState, Bulletin]:
    """Mask a new secret with a never-published sequence term."""
    _check_secret(state, value)
    n = state.next_index
    entry = SecretEntry(n, (value - state.u(n)) % state.params.Q)
    return _republish(state, secrets=state.secrets + (value,), next_index=n + 1,
                      bulletin={"secrets": state.bulletin.secrets + (entry,)})


def _secret_position(state: DealerState, i: int) -> int:
    if not 1 <= i <= len(state.secrets):
        raise IndexError(f"secret number {i} out of range 1..{len(state.secrets)}")
    return i - 1


def remove_secret(state: DealerState, i: int) -> tuple[DealerState, Bulletin]:
    pos = _secret_position(state, i)
    secrets = state.secrets[:pos] + state.secrets[pos + 1:]
    entries = state.bulletin.secrets[:pos] + state.bulletin.secrets[pos + 1:]
    return _republish(state, secrets=secrets, bulletin={"secrets": entries})


def update_secret(state: DealerState, i: int, value: int) -> tuple[DealerState, Bulletin]:
    """Replace secret i, re-masking it with a fresh term.

    Reusing the old mask would publish y' - y = S' - S to anyone who kept
    the previous bulletin.
    """
    _check_secret(state, value)
    pos = _secret_position(state, i)
    n = state.next_index
    entry = SecretEntry(n, (value - state.u(n)) % state.params.Q)
    secrets = state.secrets[:pos] + (value,) + state.secrets[pos + 1:]
    entries = state.bulletin.secrets[:pos] + (entry,) + state.bulletin.secrets[pos + 1:]
    return _republish(state, secrets=secrets, next_index=n + 1, bulletin={"secrets": entries})


def rethreshold(state: DealerState, new_k: int, rng: random.Random) -> tuple[DealerState, Bulletin]:
    """Re-deal the same secrets to the same participants under a new degree."""
    _check_threshold(state.params.Q, new_k)
    records = sorted(state.records, key=lambda r: r.index)
    return deal(state.params, state.bulletin.scheme, new_k, records, state.secrets, rng)
