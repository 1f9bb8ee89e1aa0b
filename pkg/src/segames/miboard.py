"""Authoritative MiBoard state machine.

One Reader per turn composes a self-explanation with an assigned strategy
card; the other players (Guessers) each identify the strategy with a
structured argument (strategy + reason + highlighted span).  The Reader
verifies, disagreements open a timed discussion, then the Reader rolls a
die, draws an event card, and control rotates round-robin to the next
active player.  First token to reach the end of the board wins.

Every state change is emitted as a control message on the engine outbox;
a passive replica consuming only those broadcasts reconstructs the
observable state (see replica.py).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .content import ContentBundle
from .protocol import ControlMessage, Opcode, control


class MiBoardError(Exception):
    pass


class GameFinished(MiBoardError):
    pass


class WrongPhase(MiBoardError):
    pass


class NotReader(MiBoardError):
    pass


class NotGuesser(MiBoardError):
    pass


class EmptySE(MiBoardError):
    pass


class DuplicateIdent(MiBoardError):
    pass


class InvalidReason(MiBoardError):
    pass


class InvalidHighlight(MiBoardError):
    pass


class StrategyMismatch(MiBoardError):
    """Reader tried to confirm a strategy other than the drawn card."""


class NotActive(MiBoardError):
    pass


class Phase(str, Enum):
    AWAITING_SE = "AWAITING_SE"
    IDENTIFICATION = "IDENTIFICATION"
    VERIFICATION = "VERIFICATION"
    DISCUSSION = "DISCUSSION"
    ROLL_MOVE = "ROLL_MOVE"
    EVENT = "EVENT"
    FINISHED = "FINISHED"


@dataclass(frozen=True)
class CmbArgument:
    strategy: str
    reason: str
    start: int
    end: int


@dataclass
class Seat:
    id: str
    position: int = 0
    points: int = 0
    active: bool = True


@dataclass(frozen=True)
class MiBoardConfig:
    board_length: int = 30
    die_sides: int = 6
    points_per_match: int = 1
    discussion_seconds: float = 60.0
    turn_timeout_seconds: float = 300.0


class Deck:
    """Shuffled draw pile with reshuffle-on-empty from the discard pile."""

    def __init__(self, items, rng: random.Random):
        self._rng = rng
        self._pile = list(items)
        self._rng.shuffle(self._pile)
        self._discard: list = []

    def draw(self):
        if not self._pile:
            self._pile = self._discard
            self._discard = []
            self._rng.shuffle(self._pile)
        return self._pile.pop()

    def discard(self, item) -> None:
        self._discard.append(item)


class MiBoardEngine:
    def __init__(self, player_ids: List[str], content: ContentBundle,
                 config: MiBoardConfig = MiBoardConfig(), seed: int = 0):
        if not 3 <= len(player_ids) <= 4:
            raise ValueError("MiBoard takes 3 or 4 players")
        if len(set(player_ids)) != len(player_ids):
            raise ValueError("duplicate player ids")
        self.config = config
        self.content = content
        self.rng_seed = seed
        self.rng = random.Random(seed)
        self.seats = [Seat(pid) for pid in player_ids]
        self.reader_index = 0
        self.phase: Optional[Phase] = None
        self.turn_no = 0
        self.current_card: Optional[str] = None
        self.current_se: Optional[str] = None
        self.pending_idents: Dict[str, CmbArgument] = {}
        self.winner: Optional[str] = None
        self.strategy_deck = Deck(sorted(content.strategies.keys()), self.rng)
        self.event_deck = Deck(list(content.event_cards), self.rng)
        self.outbox: List[ControlMessage] = []
        self.timer: Optional[Tuple[str, float]] = None
        self._timer_gen = 0

    # -- helpers -----------------------------------------------------------

    def _emit(self, opcode: Opcode, *fields) -> None:
        self.outbox.append(control(opcode, *fields))

    def drain(self) -> List[ControlMessage]:
        out, self.outbox = self.outbox, []
        return out

    @property
    def reader(self) -> Seat:
        return self.seats[self.reader_index]

    def seat(self, player: str) -> Optional[Seat]:
        for seat in self.seats:
            if seat.id == player:
                return seat
        return None

    def active_seats(self) -> List[Seat]:
        return [s for s in self.seats if s.active]

    def guessers(self) -> List[Seat]:
        return [s for s in self.active_seats() if s.id != self.reader.id]

    def _require_phase(self, *phases: Phase) -> None:
        if self.phase is Phase.FINISHED:
            raise GameFinished()
        if self.phase not in phases:
            raise WrongPhase(f"in {self.phase}, expected {[p.value for p in phases]}")

    def _arm_timer(self, kind: str, seconds: float) -> None:
        self._timer_gen += 1
        self.timer = (f"{kind}:{self._timer_gen}", seconds)

    # -- turn cycle --------------------------------------------------------

    def begin_turn(self) -> None:
        if self.phase is Phase.FINISHED:
            raise GameFinished()
        if self.current_card is not None:
            self.strategy_deck.discard(self.current_card)
        self.turn_no += 1
        self.current_card = self.strategy_deck.draw()
        self.current_se = None
        self.pending_idents = {}
        self.phase = Phase.AWAITING_SE
        self._emit(Opcode.TURN_BEGIN, self.reader.id, self.turn_no)
        self._emit(Opcode.STRAT_CARD, self.current_card)
        self._arm_timer("turn", self.config.turn_timeout_seconds)

    def submit_se(self, player: str, text: str) -> None:
        self._require_phase(Phase.AWAITING_SE)
        if player != self.reader.id:
            raise NotReader(player)
        if not text.strip():
            raise EmptySE()
        self.current_se = text
        self.phase = Phase.IDENTIFICATION
        self._emit(Opcode.SE_SUBMIT, player, text)

    def submit_identification(self, player: str, arg: CmbArgument) -> None:
        self._require_phase(Phase.IDENTIFICATION)
        seat = self.seat(player)
        if seat is None or not seat.active or player == self.reader.id:
            raise NotGuesser(player)
        if player in self.pending_idents:
            raise DuplicateIdent(player)
        strategy = self.content.strategies.get(arg.strategy)
        if strategy is None or arg.reason not in {r.id for r in strategy.reasons}:
            raise InvalidReason(f"{arg.strategy}/{arg.reason}")
        if not 0 <= arg.start < arg.end <= len(self.current_se or ""):
            raise InvalidHighlight(f"[{arg.start},{arg.end})")
        self.pending_idents[player] = arg
        self._emit(Opcode.IDENT_SUBMIT, player, arg.strategy, arg.reason, arg.start, arg.end)
        self._check_idents_complete()

    def _check_idents_complete(self) -> None:
        if all(g.id in self.pending_idents for g in self.guessers()):
            self.phase = Phase.VERIFICATION
            self._emit(Opcode.VERIFY, self.reader.id)

    def verify_and_resolve(self, player: str, confirmed_strategy: str) -> None:
        self._require_phase(Phase.VERIFICATION)
        if player != self.reader.id:
            raise NotReader(player)
        if confirmed_strategy != self.current_card:
            raise StrategyMismatch(confirmed_strategy)
        awards = []
        all_matched = True
        for seat in self.guessers():
            arg = self.pending_idents.get(seat.id)
            matched = arg is not None and arg.strategy == confirmed_strategy
            if matched:
                seat.points += self.config.points_per_match
                awards.extend([seat.id, self.config.points_per_match])
            else:
                all_matched = False
                awards.extend([seat.id, 0])
        self._emit(Opcode.IDENT_RESULT, confirmed_strategy, *awards)
        if all_matched:
            self.phase = Phase.ROLL_MOVE
        else:
            self.phase = Phase.DISCUSSION
            self._emit(Opcode.DISCUSS_BEGIN, int(self.config.discussion_seconds))
            self._arm_timer("discussion", self.config.discussion_seconds)

    def end_discussion(self, player: str) -> None:
        self._require_phase(Phase.DISCUSSION)
        if player != self.reader.id:
            raise NotReader(player)
        self._finish_discussion()

    def _finish_discussion(self) -> None:
        self.phase = Phase.ROLL_MOVE
        self._emit(Opcode.DISCUSS_END)
        self._arm_timer("turn", self.config.turn_timeout_seconds)

    def roll_and_move(self, player: str) -> None:
        self._require_phase(Phase.ROLL_MOVE)
        if player != self.reader.id:
            raise NotReader(player)
        die = self.rng.randint(1, self.config.die_sides)
        seat = self.reader
        seat.position = min(self.config.board_length, seat.position + die)
        self._emit(Opcode.ROLL, seat.id, die)
        self._emit(Opcode.MOVE, seat.id, seat.position)
        self.phase = Phase.EVENT

    def draw_event(self) -> None:
        self._require_phase(Phase.EVENT)
        card = self.event_deck.draw()
        self.event_deck.discard(card)
        seat = self.reader
        seat.position = max(0, min(self.config.board_length, seat.position + card.delta))
        self._emit(Opcode.EVENT_CARD, card.label, card.delta, seat.position)
        if seat.position == self.config.board_length:
            self._finish(winner=seat.id, reason="win")
            return
        self.pass_control()
        self.begin_turn()

    def pass_control(self) -> None:
        idx = self.reader_index
        for step in range(1, len(self.seats) + 1):
            cand = (idx + step) % len(self.seats)
            if self.seats[cand].active:
                self.reader_index = cand
                break
        self._emit(Opcode.CONTROL_PASS, self.reader.id)

    # -- attrition and timers ----------------------------------------------

    def remove_player(self, player: str) -> None:
        if self.phase is Phase.FINISHED:
            raise GameFinished()
        seat = self.seat(player)
        if seat is None or not seat.active:
            raise NotActive(player)
        was_reader = player == self.reader.id
        seat.active = False
        self.pending_idents.pop(player, None)
        self._emit(Opcode.LEAVE, player)
        remaining = self.active_seats()
        if len(remaining) < 2:
            winner = remaining[0].id if remaining else ""
            self._finish(winner=winner, reason="forfeit" if remaining else "abandoned")
        elif was_reader:
            self._abandon_turn()
        elif self.phase is Phase.IDENTIFICATION:
            self._check_idents_complete()

    def _abandon_turn(self) -> None:
        self.pass_control()
        self.begin_turn()

    def timer_expired(self, token: str) -> None:
        if self.phase is Phase.FINISHED or self.timer is None or self.timer[0] != token:
            return  # stale timer
        kind = token.split(":", 1)[0]
        if kind == "discussion":
            self._finish_discussion()
        else:
            self._emit(Opcode.ERROR, "TURN_TIMEOUT", self.reader.id)
            self._abandon_turn()

    def _finish(self, winner: str, reason: str) -> None:
        self.phase = Phase.FINISHED
        self.winner = winner or None
        self.timer = None
        self._emit(Opcode.GAME_OVER, winner, reason)

    # -- observation ---------------------------------------------------------

    def compact(self) -> None:
        """Drop inactive seats, as if the game had started without them."""
        reader_id = self.reader.id
        self.seats = self.active_seats()
        self.reader_index = next(i for i, s in enumerate(self.seats) if s.id == reader_id)

    def public_state(self) -> dict:
        """Broadcast-observable state; a replica must reconstruct exactly this."""
        return {
            "players": [
                {"id": s.id, "position": s.position, "points": s.points, "active": s.active}
                for s in self.seats
            ],
            "reader": self.reader.id if self.phase is not None else None,
            "phase": self.phase.value if self.phase else None,
            "turn_no": self.turn_no,
            "current_card": self.current_card,
            "current_se": self.current_se,
            "idents": {p: (a.strategy, a.reason, a.start, a.end)
                       for p, a in sorted(self.pending_idents.items())},
            "winner": self.winner,
        }
