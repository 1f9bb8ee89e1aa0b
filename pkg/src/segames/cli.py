"""Command-line interface.

    segames serve   --port 8000 --content-dir DIR --config FILE --log-path DIR
    segames harness run --game miboard --players 4 --think 30 --seed 7 --out report.txt
    segames score   --input records.jsonl --output results.jsonl [--content-dir DIR]
    segames export  --room r1 --log-path DIR --out room.tsv
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .config import load_settings
from .content import default_content_dir, load_content, prior_text
from .eventlog import EventLog
from .harness import BotScript, IdentPolicy, run_scenario
from .lobby import GameType


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(content_dir=args.content_dir, config_path=args.config,
                     log_dir=args.log_path)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _cmd_harness_run(args: argparse.Namespace) -> int:
    game_type = GameType(args.game.upper())
    script = BotScript(think_time=args.think, ident_policy=IdentPolicy(args.ident_policy))
    scripts = [script] * args.players
    result = run_scenario(game_type, args.players, scripts, seed=args.seed,
                          time_cap=args.time_cap)
    text = result.format_report()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    from .evaluator import Evaluator, TfIdfVectorSpace

    settings = load_settings(args.config)
    content = load_content(args.content_dir or default_content_dir())
    plugin = None
    if not args.no_vector_space:
        plugin = TfIdfVectorSpace([" ".join(t.sentences) for t in content.texts.values()],
                                  content.stopwords)
    evaluator = Evaluator(content.stopwords, settings.scoring, plugin)

    n = 0
    with open(args.input, encoding="utf-8") as src, \
            open(args.output, "w", encoding="utf-8") as dst:
        for line in src:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            text = content.texts[rec["text_id"]]
            target_index = text.target_indices[rec["sentence_index"]]
            result = evaluator.evaluate(rec["se"], text.sentences[target_index],
                                        prior_text(text, target_index))
            dst.write(json.dumps({
                "se": rec["se"], "text_id": rec["text_id"],
                "sentence_index": rec["sentence_index"], "score": result.score,
                "too_short": result.too_short, "too_similar": result.too_similar,
                "irrelevant": result.irrelevant, "features": result.features,
            }, ensure_ascii=False) + "\n")
            n += 1
    print(f"scored {n} records -> {args.output}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    log = EventLog(args.log_path)
    count = log.export(args.room, args.out)
    print(f"exported {count} records for room {args.room} -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="segames")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the game server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--content-dir", default=None)
    serve.add_argument("--config", default=None)
    serve.add_argument("--log-path", default="./logs")
    serve.set_defaults(fn=_cmd_serve)

    harness = sub.add_parser("harness", help="scripted bot scenarios")
    hsub = harness.add_subparsers(dest="harness_command", required=True)
    run = hsub.add_parser("run", help="run one bot scenario in simulated time")
    run.add_argument("--game", choices=["miboard", "showdown"], required=True)
    run.add_argument("--players", type=int, required=True)
    run.add_argument("--think", type=float, default=30.0)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--ident-policy", default="ALWAYS_MATCH",
                     choices=[p.value for p in IdentPolicy])
    run.add_argument("--time-cap", type=float, default=86400.0)
    run.add_argument("--out", default=None)
    run.set_defaults(fn=_cmd_harness_run)

    score = sub.add_parser("score", help="batch-score a file of self-explanations")
    score.add_argument("--input", required=True,
                       help="JSONL of {se, text_id, sentence_index}")
    score.add_argument("--output", required=True)
    score.add_argument("--content-dir", default=None)
    score.add_argument("--config", default=None)
    score.add_argument("--no-vector-space", action="store_true")
    score.set_defaults(fn=_cmd_score)

    export = sub.add_parser("export", help="export a room's event log as a table")
    export.add_argument("--room", required=True)
    export.add_argument("--log-path", default="./logs")
    export.add_argument("--out", required=True)
    export.set_defaults(fn=_cmd_export)

    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
