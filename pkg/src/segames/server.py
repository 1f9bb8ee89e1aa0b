"""Transport-agnostic game server core.

Owns the zone, routes decoded frames to the lobby or to per-room engines,
broadcasts engine output to room members, appends every broadcast to the
event log, and keeps engine timers scheduled.  All mutations for a zone go
through ``handle_frame`` / ``disconnect`` on one logical writer; the
FastAPI service drives this from the asyncio loop and the bot harness from
a simulated-time scheduler.
"""

from __future__ import annotations

import random
from typing import Callable, Dict, List, Optional

from . import miboard, showdown
from .config import AppSettings
from .content import ContentBundle
from .eventlog import EventLog, LogRecord, SYSTEM_ACTOR
from .evaluator import Evaluator, TfIdfVectorSpace
from .lobby import AlreadyInRoom, GameType, LobbyError, Room, Zone
from .miboard import CmbArgument, MiBoardEngine
from .protocol import (ChatMessage, ControlMessage, Opcode, ProtocolError,
                       control, decode_frame, encode_chat, encode_control)
from .showdown import ShowdownEngine

SendFn = Callable[[str], None]


def build_evaluator(content: ContentBundle, settings: AppSettings,
                    use_vector_space: bool = True) -> Evaluator:
    plugin = None
    if use_vector_space:
        corpus = [" ".join(t.sentences) for t in content.texts.values()]
        plugin = TfIdfVectorSpace(corpus, content.stopwords)
    return Evaluator(content.stopwords, settings.scoring, plugin)


class DuplicatePlayer(Exception):
    pass


class RoomRunner:
    def __init__(self, room: Room, members: List[str]):
        self.room = room
        self.members = list(members)
        self.engine = None
        self.timer_token: Optional[str] = None
        self.timer_handle = None
        self.finished = False


class GameServer:
    def __init__(self, content: ContentBundle, settings: AppSettings, scheduler,
                 log: EventLog, evaluator: Optional[Evaluator] = None):
        self.content = content
        self.settings = settings
        self.scheduler = scheduler
        self.log = log
        self.evaluator = evaluator or build_evaluator(content, settings)
        self.zone = Zone(settings.server.zone)
        self.sessions: Dict[str, SendFn] = {}
        self.runners: Dict[str, RoomRunner] = {}
        self._fill_timers: Dict[str, object] = {}
        self._rng = random.Random(settings.server.seed)
        self._text_counter = 0

    # -- sessions ------------------------------------------------------------

    def connect(self, player: str, send: SendFn) -> None:
        if player in self.sessions:
            raise DuplicatePlayer(player)
        self.sessions[player] = send

    def disconnect(self, player: str) -> None:
        self.sessions.pop(player, None)
        room = self.zone.room_of(player)
        if room is not None:
            self._leave(player, room)

    # -- frame entry point -----------------------------------------------------

    def handle_frame(self, player: str, frame: str) -> None:
        try:
            msg = decode_frame(frame)
        except ProtocolError as exc:
            self._send_error(player, type(exc).__name__, str(exc))
            return
        if isinstance(msg, ChatMessage):
            self._handle_chat(player, msg)
        else:
            self._handle_control(player, msg)

    def _handle_chat(self, player: str, msg: ChatMessage) -> None:
        if msg.sender != player:
            self._send_error(player, "SenderMismatch", "chat sender must be your own id")
            return
        room = self.zone.room_of(player)
        if room is None:
            self._send_error(player, "NotInRoom", "join a room before chatting")
            return
        frame = encode_chat(msg)
        self._log(room.id, player, "CHAT", (msg.text,))
        for member in self._members(room):
            self._send(member, frame)

    def _handle_control(self, player: str, msg: ControlMessage) -> None:
        try:
            self._dispatch(player, msg)
        except (miboard.MiBoardError, showdown.ShowdownError, LobbyError) as exc:
            self._send_error(player, type(exc).__name__, str(exc))
        except (ValueError, IndexError) as exc:
            self._send_error(player, "BadFields", str(exc))

    def _dispatch(self, player: str, msg: ControlMessage) -> None:
        op = msg.opcode
        if op == Opcode.JOIN:
            self._join(player, msg.fields)
            return
        if op == Opcode.LEAVE:
            room = self.zone.room_of(player)
            if room is None:
                self._send_error(player, "NotInRoom", "not in a room")
                return
            self._leave(player, room)
            return

        room = self.zone.room_of(player)
        if op == Opcode.START:
            if room is None:
                self._send_error(player, "NotInRoom", "not in a room")
            elif not room.started:
                if len(room.players) >= room.min_players:
                    self._start_room(room)
                else:
                    self._send_error(player, "NotEnoughPlayers",
                                     f"need {room.min_players} players")
            else:
                runner = self.runners[room.id]
                if isinstance(runner.engine, ShowdownEngine):
                    runner.engine.ack(player)
                    self._flush(runner)
                else:
                    self._send_error(player, "WrongPhase", "game already running")
            return

        if room is None or not room.started:
            self._send_error(player, "NotInRoom", "no running game")
            return
        runner = self.runners[room.id]
        engine = runner.engine
        if isinstance(engine, MiBoardEngine):
            self._miboard_action(engine, player, op, msg.fields)
        else:
            self._showdown_action(engine, player, op, msg.fields)
        self._flush(runner)

    def _miboard_action(self, engine: MiBoardEngine, player: str, op: str, f: tuple) -> None:
        if op == Opcode.SE_SUBMIT:
            engine.submit_se(player, f[0])
        elif op == Opcode.IDENT_SUBMIT:
            engine.submit_identification(player, CmbArgument(f[0], f[1], int(f[2]), int(f[3])))
        elif op == Opcode.VERIFY:
            engine.verify_and_resolve(player, f[0])
        elif op == Opcode.ROLL:
            engine.roll_and_move(player)
            engine.draw_event()
        elif op == Opcode.DISCUSS_END:
            engine.end_discussion(player)
        else:
            raise ValueError(f"opcode {op} is not a client action")

    def _showdown_action(self, engine: ShowdownEngine, player: str, op: str, f: tuple) -> None:
        if op == Opcode.SE_SUBMIT:
            engine.submit_se(player, f[0])
        else:
            raise ValueError(f"opcode {op} is not a client action")

    # -- lobby ----------------------------------------------------------------

    def _join(self, player: str, fields: tuple) -> None:
        try:
            game_type = GameType(fields[0])
        except (ValueError, IndexError):
            self._send_error(player, "BadFields", f"unknown game type {fields[:1]}")
            return
        try:
            room = self.zone.find_or_create_room(game_type, player)
        except AlreadyInRoom:
            self._send_error(player, "AlreadyInRoom", "leave your room first")
            return
        self._broadcast_room(room, control(Opcode.JOIN, player, room.id, game_type.value))
        if room.full:
            self._start_room(room)
        elif game_type is GameType.MIBOARD and len(room.players) >= room.min_players \
                and room.id not in self._fill_timers:
            handle = self.scheduler.schedule(self.settings.server.fill_timeout_seconds,
                                             lambda rid=room.id: self._fill_timeout(rid))
            self._fill_timers[room.id] = handle

    def _fill_timeout(self, room_id: str) -> None:
        self._fill_timers.pop(room_id, None)
        room = self.zone.get_room(room_id)
        if room is not None and not room.started and len(room.players) >= room.min_players:
            self._start_room(room)

    def _leave(self, player: str, room: Room) -> None:
        if not room.started:
            self.zone.leave_room(room, player)
            if room.id in self._fill_timers and len(room.players) < room.min_players:
                self._fill_timers.pop(room.id).cancel()
            self._broadcast_room(room, control(Opcode.LEAVE, player))
            return
        runner = self.runners.get(room.id)
        if runner is None or runner.finished:
            return
        if player in runner.members:
            runner.members.remove(player)
        runner.engine.remove_player(player)
        self._flush(runner)

    def _start_room(self, room: Room) -> None:
        self.zone.try_start(room)
        if room.id in self._fill_timers:
            self._fill_timers.pop(room.id).cancel()
        players = list(room.players)
        self._broadcast_room(room, control(Opcode.START, room.id, room.game_type.value, *players))
        runner = RoomRunner(room, players)
        seed = self._rng.randrange(2 ** 31)
        if room.game_type is GameType.MIBOARD:
            runner.engine = MiBoardEngine(players, self.content,
                                          self.settings.miboard, seed=seed)
            runner.engine.begin_turn()
        else:
            text_ids = sorted(self.content.texts.keys())
            text = self.content.texts[text_ids[self._text_counter % len(text_ids)]]
            self._text_counter += 1
            runner.engine = ShowdownEngine(players, text, self.evaluator.evaluate,
                                           self.settings.showdown)
            runner.engine.start()
        self.runners[room.id] = runner
        self._flush(runner)

    # -- engine output ----------------------------------------------------------

    def _flush(self, runner: RoomRunner) -> None:
        engine = runner.engine
        for msg in engine.drain():
            self._log(runner.room.id, SYSTEM_ACTOR, msg.opcode, msg.fields)
            frame = encode_control(msg)
            for member in runner.members:
                self._send(member, frame)
        self._sync_timer(runner)
        if not runner.finished and engine.phase is not None and engine.phase.value == "FINISHED":
            runner.finished = True
            self.zone.release_players(runner.room)

    def _sync_timer(self, runner: RoomRunner) -> None:
        want = None if runner.finished else runner.engine.timer
        token = want[0] if want else None
        if token == runner.timer_token:
            return
        if runner.timer_handle is not None:
            runner.timer_handle.cancel()
            runner.timer_handle = None
        runner.timer_token = token
        if want is not None:
            room_id = runner.room.id
            runner.timer_handle = self.scheduler.schedule(
                want[1], lambda rid=room_id, tok=token: self._engine_timer(rid, tok))

    def _engine_timer(self, room_id: str, token: str) -> None:
        runner = self.runners.get(room_id)
        if runner is None or runner.finished or runner.timer_token != token:
            return
        runner.timer_token = None
        runner.timer_handle = None
        runner.engine.timer_expired(token)
        self._flush(runner)

    # -- plumbing ---------------------------------------------------------------

    def _members(self, room: Room) -> List[str]:
        runner = self.runners.get(room.id)
        if runner is not None and room.started:
            return runner.members
        return list(room.players)

    def _broadcast_room(self, room: Room, msg: ControlMessage) -> None:
        self._log(room.id, SYSTEM_ACTOR, msg.opcode, msg.fields)
        frame = encode_control(msg)
        for member in self._members(room):
            self._send(member, frame)

    def _log(self, room_id: str, actor: str, opcode: str, fields: tuple) -> None:
        self.log.append(LogRecord(seq=self.log.next_seq(room_id),
                                  wall_time=self.scheduler.now(), room_id=room_id,
                                  actor=actor, opcode=opcode,
                                  fields=tuple(str(f) for f in fields)))

    def _send(self, player: str, frame: str) -> None:
        send = self.sessions.get(player)
        if send is not None:
            send(frame)

    def _send_error(self, player: str, code: str, detail: str) -> None:
        self._send(player, encode_control(control(Opcode.ERROR, code, detail)))
