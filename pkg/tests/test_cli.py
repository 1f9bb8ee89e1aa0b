import json

import pytest

from segames.cli import main
from segames.eventlog import EventLog, LogRecord


def test_harness_run_writes_report(tmp_path, capsys):
    out = tmp_path / "report.txt"
    rc = main(["harness", "run", "--game", "miboard", "--players", "4",
               "--think", "30", "--seed", "7", "--out", str(out)])
    assert rc == 0
    text = out.read_text(encoding="utf-8")
    assert "game=MIBOARD" in text and "completed=True" in text
    assert text.strip() == capsys.readouterr().out.strip()


def test_harness_run_showdown(tmp_path, capsys):
    rc = main(["harness", "run", "--game", "showdown", "--players", "2",
               "--think", "15", "--seed", "3"])
    assert rc == 0
    assert "game=SHOWDOWN" in capsys.readouterr().out


def test_score_batch(tmp_path, capsys):
    src = tmp_path / "in.jsonl"
    dst = tmp_path / "out.jsonl"
    rows = [
        {"se": "", "text_id": "water_cycle", "sentence_index": 0},
        {"se": "the sun heats water so it evaporates and rises as vapor",
         "text_id": "water_cycle", "sentence_index": 0},
    ]
    src.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
    rc = main(["score", "--input", str(src), "--output", str(dst)])
    assert rc == 0
    scored = [json.loads(l) for l in dst.read_text(encoding="utf-8").splitlines()]
    assert len(scored) == 2
    assert scored[0]["score"] == 0 and scored[0]["too_short"]
    assert scored[1]["score"] >= 1


def test_export_subcommand(tmp_path, capsys):
    log = EventLog(str(tmp_path))
    log.append(LogRecord(seq=1, wall_time=0.0, room_id="r1", actor="SYSTEM",
                         opcode="TURN_BEGIN", fields=("p1", "1")))
    log.close()
    out = tmp_path / "r1.tsv"
    rc = main(["export", "--room", "r1", "--log-path", str(tmp_path),
               "--out", str(out)])
    assert rc == 0
    assert "TURN_BEGIN" in out.read_text(encoding="utf-8")


def test_unknown_command_rejected():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_serve_flags_exist():
    from segames.cli import build_parser
    parser = build_parser()
    args = parser.parse_args(["serve", "--port", "9000", "--content-dir", "/c",
                              "--config", "/f.ini", "--log-path", "/l"])
    assert args.port == 9000 and args.log_path == "/l"
