"""Hash-chained audit trail of link calls, with JSONL export and replay.

Each record hashes the previous record's hash together with a canonical
serialization of its own fields, so editing any field of any record
breaks the chain from that record on. Replay re-executes the logged
calls against a fresh session and compares output digests.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from .values import dumps

FORMAT_VERSION = "1"
HASH_ALGORITHM = "sha256"
GENESIS = "0" * 64


class AuditFormatError(ValueError):
    pass


@dataclass(frozen=True)
class AuditRecord:
    seq: int
    timestamp: int
    session_id: str
    op: str
    args: str
    input_provenance: List[str]
    output_destination: List[str]
    value_digest: str
    status: int
    prev_hash: str
    this_hash: str

    def body(self) -> dict:
        d = asdict(self)
        del d["this_hash"]
        return d

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"), ensure_ascii=False)


FIELD_NAMES = [f.name for f in fields(AuditRecord)]


def chain_hash(body: dict, algorithm: str = HASH_ALGORITHM) -> str:
    h = hashlib.new(algorithm)
    h.update(body["prev_hash"].encode("ascii"))
    rest = {k: v for k, v in body.items() if k != "prev_hash"}
    h.update(dumps(rest).encode("utf-8"))
    return h.hexdigest()


class AuditLog:
    """Append-only sink owned by one session."""

    def __init__(self, session_id: str, clock: Callable[[], int] = time.time_ns,
                 algorithm: str = HASH_ALGORITHM):
        self.session_id = session_id
        self.algorithm = algorithm
        self.records: List[AuditRecord] = []
        self._clock = clock

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def head(self) -> str:
        return self.records[-1].this_hash if self.records else GENESIS

    def record(self, op: str, args: str, input_provenance: Sequence[str] = (),
               output_destination: Sequence[str] = (), value_digest: str = "",
               status: int = 0) -> AuditRecord:
        body = {
            "seq": len(self.records) + 1,
            "timestamp": int(self._clock()),
            "session_id": self.session_id,
            "op": op,
            "args": args,
            "input_provenance": list(input_provenance),
            "output_destination": list(output_destination),
            "value_digest": value_digest,
            "status": int(status),
            "prev_hash": self.head,
        }
        rec = AuditRecord(**body, this_hash=chain_hash(body, self.algorithm))
        self.records.append(rec)
        return rec


def verify_chain(records: Sequence[AuditRecord], algorithm: str = HASH_ALGORITHM) -> Optional[int]:
    """Return None if the chain is intact, else the first bad seq number."""
    prev = GENESIS
    for i, rec in enumerate(records, start=1):
        if rec.seq != i or rec.prev_hash != prev:
            return i
        if chain_hash(rec.body(), algorithm) != rec.this_hash:
            return i
        prev = rec.this_hash
    return None


def export_jsonl(records: Sequence[AuditRecord], path, algorithm: str = HASH_ALGORITHM) -> None:
    header = {"format": "hybridlink-audit", "version": FORMAT_VERSION, "hash": algorithm}
    lines = [json.dumps(header, separators=(",", ":"))]
    lines.extend(rec.to_json() for rec in records)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _record_from_obj(obj, lineno: int) -> AuditRecord:
    if not isinstance(obj, dict) or sorted(obj) != sorted(FIELD_NAMES):
        raise AuditFormatError(f"line {lineno}: record fields do not match the schema")
    return AuditRecord(**obj)


def parse_jsonl(text: str):
    """Parse exported text; returns (header, records)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise AuditFormatError("line 1: missing header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise AuditFormatError(f"line 1: invalid header ({exc.msg})") from None
    if not isinstance(header, dict) or header.get("version") != FORMAT_VERSION:
        raise AuditFormatError("line 1: unsupported audit header")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AuditFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        records.append(_record_from_obj(obj, lineno))
    return header, records


def import_jsonl(path) -> List[AuditRecord]:
    _, records = parse_jsonl(Path(path).read_text(encoding="utf-8"))
    return records


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    divergent_seq: Optional[int] = None
    reason: str = ""
    fixture_matches: bool = True

    def __bool__(self) -> bool:
        return self.ok


def replay(records: Sequence[AuditRecord], workbook) -> ReplayResult:
    """Re-run every logged call on a fresh session over ``workbook``.

    Compares status and value digest of each record, timestamps and
    session ids excluded. A workbook that differs from the logged initial
    digest is reported through ``fixture_matches`` while replay proceeds,
    so the divergence lands on the first call that actually reads the
    changed data.
    """
    from .bridge import Session

    bad = verify_chain(records)
    if bad is not None:
        return ReplayResult(False, bad, "audit chain does not verify")
    if not records:
        return ReplayResult(True)

    first = records[0]
    if first.op != "matlabinit":
        return ReplayResult(False, 1, "log does not start with matlabinit")
    session = Session.from_init_args(first.args, workbook.copy())
    init = session.audit.records[0]
    fixture_matches = json.loads(first.args).get("workbook") == workbook.digest()
    if init.value_digest != first.value_digest:
        return ReplayResult(False, 1, "initial state differs", fixture_matches)

    for rec in records[1:]:
        session.replay_call(rec.op, rec.args)
        got = session.audit.records[-1]
        if got.status != rec.status or got.value_digest != rec.value_digest:
            return ReplayResult(False, rec.seq, f"{rec.op} diverged", fixture_matches)
    return ReplayResult(True, None, "", fixture_matches)
