"""INI configuration for the server, the two game engines, and scoring.

Sections and keys (all optional; defaults shown):

    [server]
    zone = main
    fill_timeout_seconds = 30
    seed =                      ; blank -> nondeterministic

    [miboard]
    board_length = 30
    die_sides = 6
    points_per_match = 1
    discussion_seconds = 60
    turn_timeout_seconds = 300

    [showdown]
    reading_seconds = 60
    composing_seconds = 120
    round_result_seconds = 10
    bonus_round_cap = 3
    rounds =                    ; blank -> one round per target sentence

    [scoring]
    min_content_words = 5
    sim_ceiling = 0.8
    relevance_floor = 0.1
    prior_bonus_floor = 0.15
    excellent_novel_floor = 8
    stopword_list = default
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Optional

from .evaluator import ScoringConfig
from .miboard import MiBoardConfig
from .showdown import ShowdownConfig


@dataclass(frozen=True)
class ServerSettings:
    zone: str = "main"
    fill_timeout_seconds: float = 30.0
    seed: Optional[int] = None


@dataclass(frozen=True)
class AppSettings:
    server: ServerSettings = field(default_factory=ServerSettings)
    miboard: MiBoardConfig = field(default_factory=MiBoardConfig)
    showdown: ShowdownConfig = field(default_factory=ShowdownConfig)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)


def load_settings(path: Optional[str] = None) -> AppSettings:
    if path is None:
        return AppSettings()
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)

    def get(section, key, cast, default):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key).strip()
        if raw == "":
            return default
        return cast(raw)

    server = ServerSettings(
        zone=get("server", "zone", str, "main"),
        fill_timeout_seconds=get("server", "fill_timeout_seconds", float, 30.0),
        seed=get("server", "seed", int, None),
    )
    miboard = MiBoardConfig(
        board_length=get("miboard", "board_length", int, 30),
        die_sides=get("miboard", "die_sides", int, 6),
        points_per_match=get("miboard", "points_per_match", int, 1),
        discussion_seconds=get("miboard", "discussion_seconds", float, 60.0),
        turn_timeout_seconds=get("miboard", "turn_timeout_seconds", float, 300.0),
    )
    showdown = ShowdownConfig(
        reading_seconds=get("showdown", "reading_seconds", float, 60.0),
        composing_seconds=get("showdown", "composing_seconds", float, 120.0),
        round_result_seconds=get("showdown", "round_result_seconds", float, 10.0),
        bonus_round_cap=get("showdown", "bonus_round_cap", int, 3),
        rounds=get("showdown", "rounds", int, None),
    )
    scoring = ScoringConfig(
        min_content_words=get("scoring", "min_content_words", int, 5),
        sim_ceiling=get("scoring", "sim_ceiling", float, 0.8),
        relevance_floor=get("scoring", "relevance_floor", float, 0.1),
        prior_bonus_floor=get("scoring", "prior_bonus_floor", float, 0.15),
        excellent_novel_floor=get("scoring", "excellent_novel_floor", int, 8),
        stopword_list=get("scoring", "stopword_list", str, "default"),
    )
    showdown.validate()
    scoring.validate()
    return AppSettings(server=server, miboard=miboard, showdown=showdown, scoring=scoring)
