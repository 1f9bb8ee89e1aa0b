import json
import subprocess
import sys

import pytest

from segames.eventlog import (EventLog, IoError, LogRecord, SequenceGap,
                              SYSTEM_ACTOR)


def rec(seq, room="r1", opcode="ROLL", fields=(), t=0.0, actor="p1"):
    return LogRecord(seq=seq, wall_time=t, room_id=room, actor=actor,
                     opcode=opcode, fields=tuple(fields))


def test_append_and_query_round_trip(tmp_path):
    log = EventLog(str(tmp_path))
    log.append(rec(1, fields=("p1", "4"), t=1.5))
    log.append(rec(2, opcode="MOVE", fields=("p1", "4"), t=2.0))
    log.close()
    out = log.query("r1")
    assert [r.seq for r in out] == [1, 2]
    assert out[0].fields == ("p1", "4")
    assert out[0].wall_time == 1.5


def test_sequence_gap_rejected(tmp_path):
    log = EventLog(str(tmp_path))
    log.append(rec(1))
    with pytest.raises(SequenceGap):
        log.append(rec(3))
    with pytest.raises(SequenceGap):
        log.append(rec(1))  # replays are gaps too
    log.append(rec(2))
    log.close()


def test_rooms_sequence_independently(tmp_path):
    log = EventLog(str(tmp_path))
    log.append(rec(1, room="a"))
    log.append(rec(1, room="b"))
    log.append(rec(2, room="a"))
    log.close()
    assert log.room_ids() == ["a", "b"]
    assert [r.seq for r in log.query("a")] == [1, 2]
    assert [r.seq for r in log.query("b")] == [1]


def test_reopen_recovers_sequence(tmp_path):
    log = EventLog(str(tmp_path))
    for i in range(1, 6):
        log.append(rec(i))
    log.close()
    again = EventLog(str(tmp_path))
    assert again.next_seq("r1") == 6
    with pytest.raises(SequenceGap):
        again.append(rec(5))
    again.append(rec(6))
    again.close()
    assert len(again.query("r1")) == 6


def test_scan_spans_multiple_day_files(tmp_path):
    day1 = EventLog(str(tmp_path), day="20260101")
    day1.append(rec(1))
    day1.close()
    day2 = EventLog(str(tmp_path), day="20260102")
    assert day2.next_seq("r1") == 2
    day2.append(rec(2))
    day2.close()
    assert [r.seq for r in day2.query("r1")] == [1, 2]
    assert len(list(tmp_path.glob("events-*.jsonl"))) == 2


def test_unicode_and_control_chars_survive(tmp_path):
    log = EventLog(str(tmp_path))
    fields = ("héllo wörld", "tab\tand\\backslash", "pipe|#!fake")
    log.append(rec(1, fields=fields, actor=SYSTEM_ACTOR))
    log.close()
    out = EventLog(str(tmp_path)).query("r1")
    assert out[0].fields == fields
    assert out[0].actor == SYSTEM_ACTOR


def test_export_tsv(tmp_path):
    log = EventLog(str(tmp_path))
    log.append(rec(1, fields=("a", "b")))
    log.append(rec(2, opcode="MOVE"))
    log.close()
    out_path = tmp_path / "room.tsv"
    n = log.export("r1", str(out_path))
    assert n == 2
    import csv
    with open(out_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    assert rows[0] == ["seq", "wall_time", "room_id", "actor", "opcode", "fields"]
    assert rows[1][0] == "1" and rows[1][4] == "ROLL"
    assert json.loads(rows[1][5]) == ["a", "b"]


DURABILITY_WRITER = """
import os, sys
from segames.eventlog import EventLog, LogRecord
log = EventLog(sys.argv[1])
for i in range(1, 21):
    log.append(LogRecord(seq=i, wall_time=float(i), room_id="crash",
                         actor="p1", opcode="ROLL", fields=(str(i),)))
os._exit(0)  # hard exit: no close(), no atexit flushing
"""


def test_acked_records_survive_process_exit(tmp_path):
    proc = subprocess.run([sys.executable, "-c", DURABILITY_WRITER, str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    log = EventLog(str(tmp_path))
    records = log.query("crash")
    assert [r.seq for r in records] == list(range(1, 21))
    assert log.next_seq("crash") == 21
    log.append(rec(21, room="crash"))
    log.close()


def test_unwritable_directory_raises_io_error(tmp_path):
    log = EventLog(str(tmp_path))
    log.append(rec(1))
    log.close()
    log._fh = None
    log.log_dir = str(tmp_path / "missing" / "deeper")
    with pytest.raises(IoError):
        log.append(rec(2))
