"""Command-line front end over a shared board directory.

Board layout::

    <board>/params                   public parameters
    <board>/participants/<id>.pub    enrolled public keys
    <board>/bulletin                 current dealer release
    <board>/report                   last audit report

Private keys, shares and the dealer state are written only to paths given
explicitly (``--priv-out``, ``--share-out``, ``--state-out``) and never
inside the board directory.

Exit codes: 0 success, 1 a cryptographic check failed, 2 usage error,
3 I/O error, 4 malformed input file.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import random
import sys
from pathlib import Path

from . import boardio
from .boardio import FormatError
from .forgery import audit_full, audit_validity_only, forge_deal
from .pkc import key_size_report
from .scheme import (MIN_LAMBDA, CheatingDetected, ParticipantRecord, ReconstructionError,
                     add_participant, add_secret, deal, dealer_setup, extract_subshadow,
                     participant_enroll, reconstruct_method1, reconstruct_method2,
                     remove_participant, remove_secret, rethreshold, update_secret,
                     verify_bulletin, verify_participant)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO, EXIT_FORMAT = 0, 1, 2, 3, 4
SEED_ENV = "DVMSS_SEED"


class UsageError(Exception):
    pass


# -- helpers -------------------------------------------------------------------

def _rng(seed: int | None, salt: str = "") -> random.Random:
    if seed is None:
        env = os.environ.get(SEED_ENV)
        if env is None:
            return random.Random(os.urandom(32))
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    return random.Random(f"{seed}/{salt}")


def _read(path: Path) -> str:
    return Path(path).read_text()


def _write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _private_path(path: Path, board: Path, flag: str) -> Path:
    path, board = Path(path).resolve(), Path(board).resolve()
    if path == board or board in path.parents:
        raise UsageError(f"{flag} must point outside the board directory")
    return path


def _board(args) -> Path:
    return Path(args.board)


def _params(board: Path):
    return boardio.loads_params(_read(board / "params"))


def _bulletin(args):
    path = Path(args.bulletin) if getattr(args, "bulletin", None) else _board(args) / "bulletin"
    return boardio.loads_bulletin(_read(path))


def hash_to_residue(text: str, Q: int) -> int:
    """SHA-256 of the UTF-8 text, read big-endian, reduced into [1, Q)."""
    digest = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest(), "big")
    return digest % (Q - 1) + 1


def _read_secrets(path: Path, Q: int, from_text: bool) -> list[int]:
    lines = [ln.strip() for ln in _read(path).splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if from_text:
        return [hash_to_residue(ln, Q) for ln in lines]
    try:
        return [int(ln) for ln in lines]
    except ValueError:
        raise FormatError("secrets file must hold one decimal residue per line") from None


def _emit_report(report_lines: list[str], path: Path) -> None:
    text = "\n".join(report_lines) + "\n"
    _write(path, text)
    sys.stdout.write(text)


# -- commands ------------------------------------------------------------------

def cmd_setup(args) -> int:
    if args.lam < MIN_LAMBDA:
        raise UsageError(f"--lambda must be at least {MIN_LAMBDA}")
    if args.k_max < 1:
        raise UsageError("--k-max must be at least 1")
    params = dealer_setup(args.lam, args.k_max, _rng(args.seed, "setup"))
    _write(Path(args.out) / "params", boardio.dumps_params(params))
    return EXIT_OK


def cmd_keygen(args) -> int:
    board = _board(args)
    if not boardio.ID_PATTERN.match(args.id):
        raise UsageError("--id may use letters, digits, '.', '_' and '-' only")
    priv_out = _private_path(args.priv_out, board, "--priv-out")
    params = _params(board)
    record, priv = participant_enroll(params, args.id, _rng(args.seed, f"keygen/{args.id}"))
    _write(priv_out, boardio.dumps_private_key(priv))
    _write(board / "participants" / f"{args.id}.pub", boardio.dumps_public_key(record.public))
    for name, bits in key_size_report(record.public, priv).items():
        print(f"{name} = {bits}")
    return EXIT_OK


def _load_records(board: Path, ids: list[str] | None) -> list[ParticipantRecord]:
    folder = board / "participants"
    if ids is None:
        files = sorted(folder.glob("*.pub"))
    else:
        files = [folder / f"{i}.pub" for i in ids]
    return [ParticipantRecord(boardio.loads_public_key(_read(f))) for f in files]


def cmd_deal(args) -> int:
    board = _board(args)
    state_out = _private_path(args.state_out, board, "--state-out")
    params = _params(board)
    ids = args.participants.split(",") if args.participants else None
    records = _load_records(board, ids)
    secrets = _read_secrets(Path(args.secrets), params.Q, args.hash_from_text)
    try:
        state, bulletin = deal(params, args.scheme, args.k, records, secrets, _rng(args.seed, "deal"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(state_out, boardio.dumps_state(state))
    _write(board / "bulletin", boardio.dumps_bulletin(bulletin))
    return EXIT_OK


def cmd_verify(args) -> int:
    board = _board(args)
    params = _params(board)
    bulletin = _bulletin(args)
    priv = boardio.loads_private_key(_read(Path(args.priv)))
    entry = next((p for p in bulletin.participants if p.id == priv.id), None)
    if entry is None:
        raise UsageError(f"participant {priv.id!r} is not on the bulletin")
    share = extract_subshadow(params, priv, bulletin, entry.index)
    own_ok = verify_participant(params, bulletin, share)
    report = verify_bulletin(params, bulletin)
    lines = [f"participant {entry.index} ({priv.id}) own check: {'pass' if own_ok else 'FAIL'}"]
    lines += report.lines()
    _emit_report(lines, Path(args.report) if args.report else board / "report")
    if args.share_out:
        _write(_private_path(args.share_out, board, "--share-out"), boardio.dumps_share(share))
    return EXIT_OK if own_ok and report.ok else EXIT_CHECK


def cmd_recover(args) -> int:
    board = _board(args)
    params = _params(board)
    bulletin = _bulletin(args)
    shares = [boardio.loads_share(_read(Path(f))) for f in args.share]
    method = reconstruct_method1 if args.method == 1 else reconstruct_method2
    try:
        secrets = method(params, bulletin, shares)
    except CheatingDetected as exc:
        print(f"invalid shares from participants: {' '.join(map(str, exc.indices))}", file=sys.stderr)
        return EXIT_CHECK
    except ReconstructionError as exc:
        raise UsageError(str(exc)) from None
    for s in secrets:
        print(s)
    return EXIT_OK


def cmd_forge(args) -> int:
    state = boardio.loads_state(_read(Path(args.state)))
    try:
        forged = forge_deal(state, args.target, _rng(args.seed, "forge"))
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    _write(Path(args.out), boardio.dumps_bulletin(forged.bulletin))
    print("forged participants: " + " ".join(map(str, forged.forged_indices)))
    return EXIT_OK


def cmd_audit(args) -> int:
    board = _board(args)
    params = _params(board)
    bulletin = _bulletin(args)
    shares = [boardio.loads_share(_read(Path(f))) for f in args.share or []]
    if args.validity_only:
        ok = audit_validity_only(params, bulletin, shares)
        lines = [f"result: {'PASS' if ok else 'FAIL'}", f"validity-only audit over {len(shares)} shares"]
    else:
        report = audit_full(params, bulletin, shares)
        ok, lines = report.ok, report.lines()
    _emit_report(lines, Path(args.report) if args.report else board / "report")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_dyn(args) -> int:
    board = _board(args)
    state_path = _private_path(args.state, board, "--state")
    state = boardio.loads_state(_read(state_path))
    try:
        if args.op == "add-participant":
            pub = boardio.loads_public_key(_read(board / "participants" / f"{args.id}.pub"))
            state, bulletin = add_participant(state, ParticipantRecord(pub))
        elif args.op == "remove-participant":
            state, bulletin = remove_participant(state, args.id)
        elif args.op == "add-secret":
            state, bulletin = add_secret(state, args.value)
        elif args.op == "remove-secret":
            state, bulletin = remove_secret(state, args.number)
        elif args.op == "update-secret":
            state, bulletin = update_secret(state, args.number, args.value)
        else:
            state, bulletin = rethreshold(state, args.k, _rng(args.seed, "rethreshold"))
    except (ValueError, KeyError, IndexError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None
    _write(state_path, boardio.dumps_state(state))
    _write(board / "bulletin", boardio.dumps_bulletin(bulletin))
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dvmss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def board_arg(p):
        p.add_argument("--board", required=True, help="board directory")

    p = sub.add_parser("setup", help="generate dealer parameters")
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="board directory to create")
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("keygen", help="enroll a participant")
    board_arg(p)
    p.add_argument("--id", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--priv-out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("deal", help="construct and publish a bulletin")
    board_arg(p)
    p.add_argument("--scheme", type=int, choices=(1, 2), required=True)
    p.add_argument("-k", "--threshold", dest="k", type=int, required=True)
    p.add_argument("--secrets", required=True, help="file with one secret per line")
    p.add_argument("--hash-from-text", action="store_true",
                   help="map each secrets line into [1, Q) via SHA-256")
    p.add_argument("--participants", help="comma-separated ids in participant order")
    p.add_argument("--seed", type=int)
    p.add_argument("--state-out", required=True)
    p.set_defaults(func=cmd_deal)

    p = sub.add_parser("verify", help="participant-side extraction and audit")
    board_arg(p)
    p.add_argument("--priv", required=True)
    p.add_argument("--bulletin")
    p.add_argument("--share-out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("recover", help="reconstruct the secrets from shares")
    board_arg(p)
    p.add_argument("--share", action="append", required=True)
    p.add_argument("--method", type=int, choices=(1, 2), default=1)
    p.add_argument("--bulletin")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("forge", help="write a dishonest-dealer bulletin")
    board_arg(p)
    p.add_argument("--state", required=True)
    p.add_argument("--target", type=int, action="append", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("audit", help="audit a bulletin and optional shares")
    board_arg(p)
    p.add_argument("--bulletin")
    p.add_argument("--share", action="append")
    p.add_argument("--validity-only", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("dyn", help="dynamic updates to a live deal")
    dyn = p.add_subparsers(dest="op", required=True)
    for name in ("add-participant", "remove-participant", "add-secret", "remove-secret",
                 "update-secret", "rethreshold"):
        d = dyn.add_parser(name)
        board_arg(d)
        d.add_argument("--state", required=True)
        if name.endswith("participant"):
            d.add_argument("--id", required=True)
        if name in ("add-secret", "update-secret"):
            d.add_argument("--value", type=int, required=True)
        if name in ("remove-secret", "update-secret"):
            d.add_argument("--number", type=int, required=True)
        if name == "rethreshold":
            d.add_argument("-k", "--threshold", dest="k", type=int, required=True)
            d.add_argument("--seed", type=int)
        d.set_defaults(func=cmd_dyn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dvmss: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"dvmss: malformed file: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"dvmss: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
