"""Scripted-bot harness over the real wire protocol.

Bots connect through the lobby, exchange encoded frames with the server
core, and play full games under a simulated clock, so scenarios run in
milliseconds and are fully deterministic under a fixed seed.  The harness
measures per-player idle intervals (periods with no available action) to
quantify lulls in gameplay, and can compare the two games' lull profiles.
"""

from __future__ import annotations

import random
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .clock import SimScheduler
from .config import AppSettings, ServerSettings
from .content import ContentBundle, default_content_dir, load_content
from .eventlog import EventLog, LogRecord
from .lobby import GameType
from .protocol import (ControlMessage, Opcode, ProtocolError, control,
                       decode_frame, encode_control)
from .server import GameServer


class HarnessError(Exception):
    pass


class ScenarioTimeout(HarnessError):
    pass


class ProtocolViolation(HarnessError):
    pass


class IdentPolicy(str, Enum):
    ALWAYS_MATCH = "ALWAYS_MATCH"
    ALWAYS_MISS = "ALWAYS_MISS"
    RANDOM = "RANDOM"


DEFAULT_SE_CORPUS = [
    "This means the process copies genetic material so each new cell has a complete"
    " instruction set, like duplicating a recipe before splitting a kitchen.",
    "So the water keeps moving in a loop driven by solar energy, which explains why"
    " rain eventually returns to the ocean it originally came from.",
    "In other words the structure described earlier controls what happens next, and"
    " the mechanism links back to the first step of the cycle.",
]


@dataclass
class BotScript:
    think_time: Union[float, Tuple[float, float]] = 30.0
    se_corpus: Sequence[str] = tuple(DEFAULT_SE_CORPUS)
    ident_policy: IdentPolicy = IdentPolicy.ALWAYS_MATCH
    depart_at: Optional[int] = None  # turn (MiBoard) or round (Showdown) number


@dataclass
class LullReport:
    per_player: Dict[str, List[Tuple[float, float]]]

    def _lengths(self) -> List[float]:
        return [end - start for ivs in self.per_player.values() for start, end in ivs]

    @property
    def max_idle(self) -> float:
        lengths = self._lengths()
        return max(lengths) if lengths else 0.0

    @property
    def mean_idle(self) -> float:
        lengths = self._lengths()
        return sum(lengths) / len(lengths) if lengths else 0.0

    @property
    def total_idle(self) -> float:
        return sum(self._lengths())


@dataclass(frozen=True)
class LullComparison:
    diff_max: float
    diff_mean: float
    diff_total: float
    showdown_max_lower: bool
    showdown_mean_lower: bool


def compare_lulls(miboard_report: LullReport, showdown_report: LullReport) -> LullComparison:
    return LullComparison(
        diff_max=miboard_report.max_idle - showdown_report.max_idle,
        diff_mean=miboard_report.mean_idle - showdown_report.mean_idle,
        diff_total=miboard_report.total_idle - showdown_report.total_idle,
        showdown_max_lower=showdown_report.max_idle < miboard_report.max_idle,
        showdown_mean_lower=showdown_report.mean_idle < miboard_report.mean_idle,
    )


@dataclass
class ScenarioResult:
    game_type: GameType
    room_id: str
    report: LullReport
    rounds_completed: int
    completed: bool
    records: List[LogRecord]
    frames: List[Tuple[float, str, str]]  # (sim time, recipient, frame)
    server: GameServer = field(repr=False, default=None)

    def format_report(self) -> str:
        lines = [f"game={self.game_type.value} room={self.room_id} "
                 f"completed={self.completed} rounds={self.rounds_completed}"]
        for player, intervals in sorted(self.report.per_player.items()):
            total = sum(e - s for s, e in intervals)
            longest = max((e - s for s, e in intervals), default=0.0)
            lines.append(f"  {player}: idle_intervals={len(intervals)} "
                         f"total={total:.1f}s max={longest:.1f}s")
        lines.append(f"  aggregate: max={self.report.max_idle:.1f}s "
                     f"mean={self.report.mean_idle:.1f}s total={self.report.total_idle:.1f}s")
        return "\n".join(lines)


class _Bot:
    def __init__(self, player: str, script: BotScript, server: GameServer,
                 scheduler: SimScheduler, rng: random.Random, trace: list):
        self.player = player
        self.script = script
        self.server = server
        self.scheduler = scheduler
        self.rng = rng
        self.trace = trace
        self.departed = False
        self.done = False
        self.violations: List[str] = []
        self._se_cursor = 0

    def on_frame(self, frame: str) -> None:
        self.trace.append((self.scheduler.now(), self.player, frame))
        try:
            msg = decode_frame(frame)
        except ProtocolError as exc:
            self.violations.append(f"{self.player}: {frame!r}: {exc}")
            return
        if isinstance(msg, ControlMessage):
            self.handle(msg)

    def handle(self, msg: ControlMessage) -> None:
        raise NotImplementedError

    def send(self, msg: ControlMessage) -> None:
        self.server.handle_frame(self.player, encode_control(msg))

    def later(self, delay: float, fn) -> None:
        self.scheduler.schedule(delay, fn)

    def think_seconds(self) -> float:
        t = self.script.think_time
        if isinstance(t, tuple):
            lo, hi = t
            return self.rng.uniform(lo, hi)
        return float(t)

    def next_se(self) -> str:
        se = self.script.se_corpus[self._se_cursor % len(self.script.se_corpus)]
        self._se_cursor += 1
        return se

    def depart(self) -> None:
        self.departed = True
        self.send(control(Opcode.LEAVE))


class MiBoardBot(_Bot):
    def __init__(self, *args, content: ContentBundle, **kwargs):
        super().__init__(*args, **kwargs)
        self.content = content
        self.reader: Optional[str] = None
        self.card: Optional[str] = None
        self.turn_no = 0
        self.in_discussion = False

    def handle(self, msg: ControlMessage) -> None:
        if self.departed or self.done:
            return
        op, f = msg.opcode, msg.fields
        if op == Opcode.TURN_BEGIN:
            self.reader = f[0]
            self.turn_no = int(f[1])
            self.in_discussion = False
            if self.script.depart_at is not None and self.turn_no >= self.script.depart_at:
                self.later(0, self.depart)
        elif op == Opcode.STRAT_CARD:
            self.card = f[0]
            if self.reader == self.player:
                turn = self.turn_no
                self.later(self.think_seconds(), lambda: self._submit_se(turn))
        elif op == Opcode.SE_SUBMIT:
            if self.reader != self.player:
                turn, se_len = self.turn_no, len(f[1])
                self.later(0, lambda: self._submit_ident(turn, se_len))
        elif op == Opcode.VERIFY:
            if f[0] == self.player:
                turn = self.turn_no
                self.later(0, lambda: self._verify(turn))
        elif op == Opcode.IDENT_RESULT:
            if self.reader == self.player:
                turn = self.turn_no
                self.later(0, lambda: self._roll(turn))
        elif op == Opcode.DISCUSS_BEGIN:
            self.in_discussion = True
            if self.reader == self.player:
                turn = self.turn_no
                self.later(0, lambda: self._end_discussion(turn))
        elif op == Opcode.DISCUSS_END:
            self.in_discussion = False
            if self.reader == self.player:
                turn = self.turn_no
                self.later(0, lambda: self._roll(turn))
        elif op == Opcode.GAME_OVER:
            self.done = True

    def _live(self, turn: int) -> bool:
        return not self.departed and not self.done and self.turn_no == turn

    def _submit_se(self, turn: int) -> None:
        if self._live(turn) and self.reader == self.player:
            self.send(control(Opcode.SE_SUBMIT, self.next_se()))

    def _pick_strategy(self) -> str:
        ids = sorted(self.content.strategies.keys())
        if self.script.ident_policy is IdentPolicy.ALWAYS_MATCH:
            return self.card
        if self.script.ident_policy is IdentPolicy.ALWAYS_MISS:
            return next(s for s in ids if s != self.card)
        return self.rng.choice(ids)

    def _submit_ident(self, turn: int, se_len: int) -> None:
        if self._live(turn) and self.reader != self.player:
            strategy = self._pick_strategy()
            reason = self.content.strategies[strategy].reasons[0].id
            self.send(control(Opcode.IDENT_SUBMIT, strategy, reason, 0, se_len))

    def _verify(self, turn: int) -> None:
        if self._live(turn) and self.reader == self.player:
            self.send(control(Opcode.VERIFY, self.card))

    def _end_discussion(self, turn: int) -> None:
        if self._live(turn) and self.in_discussion and self.reader == self.player:
            self.send(control(Opcode.DISCUSS_END))

    def _roll(self, turn: int) -> None:
        if self._live(turn) and not self.in_discussion and self.reader == self.player:
            self.send(control(Opcode.ROLL))


class ShowdownBot(_Bot):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.round_no = 0

    def handle(self, msg: ControlMessage) -> None:
        if self.departed or self.done:
            return
        op, f = msg.opcode, msg.fields
        if op == Opcode.ROUND_BEGIN:
            self.round_no = int(f[0])
            if self.script.depart_at is not None and self.round_no >= self.script.depart_at:
                self.later(0, self.depart)
                return
            rnd = self.round_no
            self.later(0, lambda: self._ack(rnd))  # done reading
        elif op == Opcode.TIMER_TICK and f[0] == "COMPOSING":
            rnd = self.round_no
            self.later(self.think_seconds(), lambda: self._submit(rnd))
        elif op == Opcode.TIMER_TICK and f[0] == "ROUND_RESULT":
            rnd = self.round_no
            self.later(0, lambda: self._ack(rnd))
        elif op == Opcode.MATCH_RESULT:
            self.done = True

    def _live(self, rnd: int) -> bool:
        return not self.departed and not self.done and self.round_no == rnd

    def _ack(self, rnd: int) -> None:
        if self._live(rnd):
            self.send(control(Opcode.START))

    def _submit(self, rnd: int) -> None:
        if self._live(rnd):
            self.send(control(Opcode.SE_SUBMIT, self.next_se()))


class LullAnalyzer:
    """Derives per-player idle intervals from a room's event log.

    Idle means the player has no available action: a Guesser waiting for
    the Reader's composition or roll, the Reader waiting for
    identifications, or a Showdown player who already submitted waiting
    for the opponent.  Chat-open discussion windows do not count as idle.
    """

    def __init__(self, players: Sequence[str]):
        self.intervals: Dict[str, List[Tuple[float, float]]] = {p: [] for p in players}
        self._open: Dict[str, float] = {}
        self._active = set(players)
        self._reader: Optional[str] = None

    def _begin(self, player: str, t: float) -> None:
        if player in self._active and player not in self._open:
            self._open[player] = t

    def _end(self, player: str, t: float) -> None:
        start = self._open.pop(player, None)
        if start is not None and t > start:
            self.intervals[player].append((start, t))

    def _end_all(self, t: float) -> None:
        for player in list(self._open):
            self._end(player, t)

    def feed(self, opcode: str, fields: tuple, t: float) -> None:
        if opcode == Opcode.TURN_BEGIN:  # MiBoard: guessers wait for the SE
            self._end_all(t)
            self._reader = fields[0]
            for player in self._active:
                if player != self._reader:
                    self._begin(player, t)
        elif opcode == Opcode.SE_SUBMIT and self._reader is not None:
            for player in list(self._open):
                self._end(player, t)
            self._begin(self._reader, t)  # reader waits for identifications
        elif opcode == Opcode.IDENT_SUBMIT:
            self._begin(fields[0], t)
        elif opcode == Opcode.VERIFY:
            self._end(self._reader, t)  # reader has the verify task
        elif opcode == Opcode.DISCUSS_BEGIN:
            self._end_all(t)  # chat is open to everyone
        elif opcode == Opcode.DISCUSS_END:
            for player in self._active:
                if player != self._reader:
                    self._begin(player, t)
        elif opcode == Opcode.TIMER_TICK and fields[0] == "COMPOSING":
            self._end_all(t)  # Showdown: both players compose at once
        elif opcode == Opcode.SE_SUBMIT:
            self._begin(fields[0], t)  # submitted, waiting for opponent
        elif opcode in (Opcode.ROUND_RESULT, Opcode.ROUND_BEGIN):
            self._end_all(t)
        elif opcode == Opcode.LEAVE:
            self._end(fields[0], t)
            self._active.discard(fields[0])
        elif opcode in (Opcode.GAME_OVER, Opcode.MATCH_RESULT):
            self._end_all(t)
            self._active.clear()

    def report(self) -> LullReport:
        return LullReport(per_player=dict(self.intervals))


def run_scenario(game_type: GameType, n_players: int, scripts: Sequence[BotScript],
                 seed: int, *, content: Optional[ContentBundle] = None,
                 settings: Optional[AppSettings] = None, log_dir: Optional[str] = None,
                 time_cap: float = 86400.0,
                 require_completion: bool = False) -> ScenarioResult:
    if len(scripts) != n_players:
        raise ValueError("one script per player required")
    game_type = GameType(game_type)
    lo, hi = {GameType.MIBOARD: (3, 4), GameType.SHOWDOWN: (2, 2)}[game_type]
    if not lo <= n_players <= hi:
        raise ValueError(f"{game_type.value} takes {lo}..{hi} players, got {n_players}")

    content = content or load_content(default_content_dir())
    if settings is None:
        settings = AppSettings(server=ServerSettings(seed=seed))
    log_dir = log_dir or tempfile.mkdtemp(prefix="segames-harness-")
    scheduler = SimScheduler()
    server = GameServer(content, settings, scheduler, EventLog(log_dir))

    trace: List[Tuple[float, str, str]] = []
    bots: List[_Bot] = []
    for i, script in enumerate(scripts):
        pid = f"bot{i + 1}"
        rng = random.Random(seed * 1000003 + i)
        if game_type is GameType.MIBOARD:
            bot = MiBoardBot(pid, script, server, scheduler, rng, trace, content=content)
        else:
            bot = ShowdownBot(pid, script, server, scheduler, rng, trace)
        bots.append(bot)
        server.connect(pid, bot.on_frame)

    def join(bot: _Bot) -> None:
        bot.send(control(Opcode.JOIN, game_type.value))

    for bot in bots:
        scheduler.schedule(0, lambda b=bot: join(b))

    scheduler.run(until=time_cap)

    violations = [v for bot in bots for v in bot.violations]
    if violations:
        raise ProtocolViolation("; ".join(violations))

    room_id = server.zone.rooms[0].id if server.zone.rooms else ""
    records = server.log.query(room_id)
    players = [b.player for b in bots]
    analyzer = LullAnalyzer(players)
    for rec in records:
        if rec.opcode != "CHAT":
            analyzer.feed(rec.opcode, rec.fields, rec.wall_time)

    end_ops = {Opcode.GAME_OVER.value, Opcode.MATCH_RESULT.value}
    completed = any(rec.opcode in end_ops for rec in records)
    if game_type is GameType.MIBOARD:
        se_count = sum(1 for rec in records
                       if rec.opcode == Opcode.SE_SUBMIT and rec.actor == "SYSTEM")
        rounds = se_count // n_players
    else:
        rounds = sum(1 for rec in records if rec.opcode == Opcode.ROUND_RESULT)

    if require_completion and not completed:
        raise ScenarioTimeout(f"scenario hit the {time_cap}s cap before finishing")

    return ScenarioResult(game_type=game_type, room_id=room_id,
                          report=analyzer.report(), rounds_completed=rounds,
                          completed=completed, records=records, frames=trace,
                          server=server)
