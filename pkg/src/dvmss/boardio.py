"""Text serialization for the file-based bulletin board.

Every file is INI-style text (``configparser``): named sections, one
``key = value`` per line, integers in decimal. The first section of each
file carries ``format = dvmss-<kind>/<version>``; readers reject anything
else. Layouts:

params          [params] format lambda N Q q g
public key      [public-key] format id e N
private key     [private-key] format id p q e d
share           [share] format index value
bulletin        [bulletin] format scheme k c tail tail_index
                [participant <i>] id e N H T        (one per participant number i)
                [secret <j>] mask_index y           (j = 1..l, in order)
dealer state    [dealer-state] format variant k c Q initials next_index
                [params] ...   [record <i>] id e N   [secret-value <j>] value
                followed by the bulletin sections
"""

from __future__ import annotations

import configparser
import io
import re

from .modmath import DlpGroup
from .nlr import NlrSpec
from .pkc import PkcPrivateKey, PkcPublicKey
from .scheme import (BoardEntry, Bulletin, DealerParams, DealerState, ParticipantRecord,
                     SecretEntry, Share)

VERSION = 1
ID_PATTERN = re.compile(r"^[A-Za-z0-9_.-]{1,64}$")


class FormatError(ValueError):
    """Malformed file, missing field, or unsupported format version."""


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str  # keys are case-sensitive (N vs n)
    return cp


def _render(sections: list[tuple[str, dict]]) -> str:
    cp = _parser()
    for name, fields in sections:
        cp[name] = {k: str(v) for k, v in fields.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _parse(text: str, kind: str) -> configparser.ConfigParser:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise FormatError(f"unparseable {kind} file: {exc}") from exc
    sections = cp.sections()
    if not sections:
        raise FormatError(f"empty {kind} file")
    fmt = cp[sections[0]].get("format")
    if fmt != f"dvmss-{kind}/{VERSION}":
        raise FormatError(f"expected format dvmss-{kind}/{VERSION}, found {fmt!r}")
    return cp


def _int(section, key: str) -> int:
    try:
        return int(section[key])
    except KeyError:
        raise FormatError(f"[{section.name}] missing field {key!r}") from None
    except ValueError:
        raise FormatError(f"[{section.name}] field {key!r} is not a decimal integer") from None


def _str(section, key: str) -> str:
    try:
        return section[key]
    except KeyError:
        raise FormatError(f"[{section.name}] missing field {key!r}") from None


def _numbered(cp, prefix: str) -> list[tuple[int, configparser.SectionProxy]]:
    out = []
    for name in cp.sections():
        head, _, tail = name.partition(" ")
        if head == prefix:
            if not tail.isdigit():
                raise FormatError(f"bad section name [{name}]")
            out.append((int(tail), cp[name]))
    return sorted(out, key=lambda t: t[0])


def _tag(kind: str) -> str:
    return f"dvmss-{kind}/{VERSION}"


# -- params / keys / shares ------------------------------------------------------

def _params_fields(params: DealerParams) -> dict:
    return {"lambda": params.lam, "N": params.N, "Q": params.Q, "q": params.q, "g": params.g}


def _params_from(section) -> DealerParams:
    return DealerParams(_int(section, "lambda"), _int(section, "N"),
                        DlpGroup(_int(section, "Q"), _int(section, "q"), _int(section, "g")))


def dumps_params(params: DealerParams) -> str:
    return _render([("params", {"format": _tag("params"), **_params_fields(params)})])


def loads_params(text: str) -> DealerParams:
    return _params_from(_parse(text, "params")["params"])


def dumps_public_key(pub: PkcPublicKey) -> str:
    return _render([("public-key", {"format": _tag("pubkey"), "id": pub.id, "e": pub.e, "N": pub.N})])


def loads_public_key(text: str) -> PkcPublicKey:
    s = _parse(text, "pubkey")["public-key"]
    return PkcPublicKey(_str(s, "id"), _int(s, "e"), _int(s, "N"))


def dumps_private_key(priv: PkcPrivateKey) -> str:
    return _render([("private-key", {"format": _tag("privkey"), "id": priv.id, "p": priv.p,
                                     "q": priv.q, "e": priv.e, "d": priv.d})])


def loads_private_key(text: str) -> PkcPrivateKey:
    s = _parse(text, "privkey")["private-key"]
    return PkcPrivateKey(_str(s, "id"), _int(s, "p"), _int(s, "q"), _int(s, "e"), _int(s, "d"))


def dumps_share(share: Share) -> str:
    return _render([("share", {"format": _tag("share"), "index": share.index, "value": share.value})])


def loads_share(text: str) -> Share:
    s = _parse(text, "share")["share"]
    return Share(_int(s, "index"), _int(s, "value"))


# -- bulletin ------------------------------------------------------------------

def _bulletin_sections(b: Bulletin, fmt: bool = True) -> list[tuple[str, dict]]:
    head = {"format": _tag("bulletin")} if fmt else {}
    head.update(scheme=b.scheme, k=b.k, c=b.c, tail=b.tail, tail_index=b.tail_index)
    sections = [("bulletin", head)]
    for p in b.participants:
        sections.append((f"participant {p.index}", {"id": p.id, "e": p.e, "N": p.N, "H": p.H, "T": p.T}))
    for j, s in enumerate(b.secrets, 1):
        sections.append((f"secret {j}", {"mask_index": s.mask_index, "y": s.y}))
    return sections


def _bulletin_from(cp) -> Bulletin:
    if "bulletin" not in cp:
        raise FormatError("missing [bulletin] section")
    h = cp["bulletin"]
    entries = tuple(BoardEntry(i, _str(s, "id"), _int(s, "e"), _int(s, "N"), _int(s, "H"), _int(s, "T"))
                    for i, s in _numbered(cp, "participant"))
    secrets = tuple(SecretEntry(_int(s, "mask_index"), _int(s, "y")) for _, s in _numbered(cp, "secret"))
    scheme = _int(h, "scheme")
    if scheme not in (1, 2):
        raise FormatError(f"scheme must be 1 or 2, found {scheme}")
    return Bulletin(scheme, _int(h, "k"), _int(h, "c"), _int(h, "tail"), _int(h, "tail_index"),
                    entries, secrets)


def dumps_bulletin(b: Bulletin) -> str:
    return _render(_bulletin_sections(b))


def loads_bulletin(text: str) -> Bulletin:
    return _bulletin_from(_parse(text, "bulletin"))


# -- dealer state (private to the dealer) ----------------------------------------

def dumps_state(state: DealerState) -> str:
    spec = state.spec
    sections = [
        ("dealer-state", {"format": _tag("state"), "variant": int(spec.variant), "k": spec.k,
                          "c": spec.c, "Q": spec.Q, "initials": " ".join(map(str, spec.initials)),
                          "next_index": state.next_index}),
        ("params", _params_fields(state.params)),
    ]
    for r in state.records:
        sections.append((f"record {r.index}", {"id": r.id, "e": r.public.e, "N": r.public.N}))
    for j, v in enumerate(state.secrets, 1):
        sections.append((f"secret-value {j}", {"value": v}))
    sections += _bulletin_sections(state.bulletin, fmt=False)
    return _render(sections)


def loads_state(text: str) -> DealerState:
    cp = _parse(text, "state")
    h = cp["dealer-state"]
    if "params" not in cp:
        raise FormatError("missing [params] section")
    try:
        initials = tuple(int(x) for x in _str(h, "initials").split())
    except ValueError:
        raise FormatError("initials must be decimal integers") from None
    try:
        spec = NlrSpec(_int(h, "variant"), _int(h, "k"), initials, _int(h, "c"), _int(h, "Q"))
    except ValueError as exc:
        raise FormatError(f"invalid sequence description: {exc}") from None
    records = tuple(ParticipantRecord(PkcPublicKey(_str(s, "id"), _int(s, "e"), _int(s, "N")), i)
                    for i, s in _numbered(cp, "record"))
    secrets = tuple(_int(s, "value") for _, s in _numbered(cp, "secret-value"))
    return DealerState(_params_from(cp["params"]), spec, records, secrets, _bulletin_from(cp),
                       _int(h, "next_index"))
