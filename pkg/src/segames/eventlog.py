"""Append-only game event log.

Records are JSON objects, one per line, written to a per-day file inside
the log directory.  Sequence numbers are strictly increasing per room with
no gaps; an append is acknowledged only after the line is flushed and
fsynced, so acked records survive a process crash.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, asdict, field
from typing import Dict, List, Optional

SYSTEM_ACTOR = "SYSTEM"


class EventLogError(Exception):
    pass


class SequenceGap(EventLogError):
    pass


class IoError(EventLogError):
    pass


@dataclass(frozen=True)
class LogRecord:
    seq: int
    wall_time: float
    room_id: str
    actor: str
    opcode: str
    fields: tuple = field(default_factory=tuple)

    def to_json(self) -> str:
        d = asdict(self)
        d["fields"] = list(self.fields)
        return json.dumps(d, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "LogRecord":
        d = json.loads(line)
        return cls(seq=d["seq"], wall_time=d["wall_time"], room_id=d["room_id"],
                   actor=d["actor"], opcode=d["opcode"], fields=tuple(d["fields"]))


class EventLog:
    def __init__(self, log_dir: str, day: Optional[str] = None):
        self.log_dir = log_dir
        os.makedirs(log_dir, exist_ok=True)
        self._day = day or time.strftime("%Y%m%d")
        self._last_seq: Dict[str, int] = {}
        self._fh = None
        # recover per-room sequence positions from existing files
        for rec in self._scan():
            self._last_seq[rec.room_id] = max(self._last_seq.get(rec.room_id, 0), rec.seq)

    def _path(self) -> str:
        return os.path.join(self.log_dir, f"events-{self._day}.jsonl")

    def _files(self) -> List[str]:
        names = [n for n in os.listdir(self.log_dir)
                 if n.startswith("events-") and n.endswith(".jsonl")]
        return [os.path.join(self.log_dir, n) for n in sorted(names)]

    def _scan(self):
        for path in self._files():
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        yield LogRecord.from_json(line)

    def next_seq(self, room_id: str) -> int:
        return self._last_seq.get(room_id, 0) + 1

    def append(self, record: LogRecord) -> None:
        expected = self.next_seq(record.room_id)
        if record.seq != expected:
            raise SequenceGap(f"room {record.room_id}: got seq {record.seq}, expected {expected}")
        try:
            if self._fh is None:
                self._fh = open(self._path(), "a", encoding="utf-8")
            self._fh.write(record.to_json() + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())
        except OSError as exc:
            raise IoError(str(exc)) from exc
        self._last_seq[record.room_id] = record.seq

    def query(self, room_id: str) -> List[LogRecord]:
        records = [rec for rec in self._scan() if rec.room_id == room_id]
        records.sort(key=lambda r: r.seq)
        return records

    def room_ids(self) -> List[str]:
        return sorted({rec.room_id for rec in self._scan()})

    def export(self, room_id: str, out_path: str) -> int:
        """Write a room's records as a tab-separated table; returns row count."""
        records = self.query(room_id)
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, delimiter="\t")
            writer.writerow(["seq", "wall_time", "room_id", "actor", "opcode", "fields"])
            for rec in records:
                writer.writerow([rec.seq, rec.wall_time, rec.room_id, rec.actor,
                                 rec.opcode, json.dumps(list(rec.fields), ensure_ascii=False)])
        return len(records)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
