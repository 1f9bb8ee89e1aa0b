"""Authoritative Self-Explanation Showdown state machine.

Two players read the same text up to a target sentence, compose
self-explanations simultaneously, and an automated evaluator scores each
on the 0-3 scale.  The higher score wins the round's stake; a tied round
raises the next round's stake to 2.  Every phase is bounded by a timer
whose duration is a positive multiple of 2 seconds, and both players
acknowledging a waiting phase ends it early.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Set, Tuple

from .content import PracticeText, prior_text
from .protocol import ControlMessage, Opcode, control


class ShowdownError(Exception):
    pass


class WrongPlayerCount(ShowdownError):
    pass


class EmptyText(ShowdownError):
    pass


class WrongPhase(ShowdownError):
    pass


class DuplicateSubmission(ShowdownError):
    pass


class NotInMatch(ShowdownError):
    pass


class EvaluatorFailure(ShowdownError):
    """The scoring call failed; the round is voided and replayed."""


class Phase(str, Enum):
    READING = "READING"
    COMPOSING = "COMPOSING"
    SCORING = "SCORING"
    ROUND_RESULT = "ROUND_RESULT"
    FINISHED = "FINISHED"


@dataclass(frozen=True)
class ShowdownConfig:
    reading_seconds: float = 60.0
    composing_seconds: float = 120.0
    round_result_seconds: float = 10.0
    bonus_round_cap: int = 3
    rounds: Optional[int] = None  # default: one round per target sentence

    def validate(self) -> None:
        for name in ("reading_seconds", "composing_seconds", "round_result_seconds"):
            v = getattr(self, name)
            if v <= 0 or v % 2 != 0:
                raise ValueError(f"{name} must be a positive multiple of 2, got {v}")


# evaluation callback: (se, target_sentence, prior_text) -> object with .score
EvalFn = Callable[[str, str, str], object]


class ShowdownEngine:
    def __init__(self, player_ids: List[str], text: PracticeText, eval_fn: EvalFn,
                 config: ShowdownConfig = ShowdownConfig()):
        if len(player_ids) != 2 or len(set(player_ids)) != 2:
            raise WrongPlayerCount(f"showdown takes exactly 2 players, got {player_ids}")
        if not text.target_indices:
            raise EmptyText(text.id)
        config.validate()
        self.config = config
        self.text = text
        self.eval_fn = eval_fn
        self.players = list(player_ids)
        self.scores: Dict[str, int] = {p: 0 for p in self.players}
        self.round_no = 0
        self.stake = 1
        self._next_stake = 1
        self.target_index: Optional[int] = None
        self.phase: Optional[Phase] = None
        self.submissions: Dict[str, str] = {}
        self._acks: Set[str] = set()
        self._bonus_used = 0
        self._in_bonus = False
        self.planned_rounds = config.rounds or len(text.target_indices)
        self.awarded_stakes: List[int] = []  # stake of every decided round
        self.result: Optional[Tuple[str, str]] = None  # (winner or "", reason)
        self.last_round: Optional[tuple] = None
        self.outbox: List[ControlMessage] = []
        self.timer: Optional[Tuple[str, float]] = None
        self._timer_gen = 0

    # -- helpers -------------------------------------------------------------

    def _emit(self, opcode: Opcode, *fields) -> None:
        self.outbox.append(control(opcode, *fields))

    def drain(self) -> List[ControlMessage]:
        out, self.outbox = self.outbox, []
        return out

    def _arm_timer(self, seconds: float) -> None:
        assert seconds > 0 and seconds % 2 == 0, "phase timers run on 2-second intervals"
        self._timer_gen += 1
        self.timer = (f"{self.phase.value}:{self._timer_gen}", seconds)

    def _enter(self, phase: Phase, seconds: float) -> None:
        self.phase = phase
        self._acks = set()
        self._arm_timer(seconds)
        self._emit(Opcode.TIMER_TICK, phase.value, int(seconds))

    def _round_target(self, round_no: int) -> int:
        targets = self.text.target_indices
        if self._in_bonus and self.text.bonus_target_index is not None:
            return self.text.bonus_target_index
        return targets[(round_no - 1) % len(targets)]

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> None:
        if self.round_no != 0:
            raise WrongPhase("match already started")
        self._begin_round(1, self._next_stake)

    def _begin_round(self, round_no: int, stake: int) -> None:
        self.round_no = round_no
        self.stake = stake
        self.target_index = self._round_target(round_no)
        self.submissions = {}
        target = self.text.sentences[self.target_index]
        prior = prior_text(self.text, self.target_index)
        self._emit(Opcode.ROUND_BEGIN, round_no, stake, self.text.id,
                   self.target_index, target, prior)
        self._enter(Phase.READING, self.config.reading_seconds)

    def submit_se(self, player: str, text: str) -> None:
        if player not in self.scores:
            raise NotInMatch(player)
        if self.phase is not Phase.COMPOSING:
            raise WrongPhase(f"cannot submit during {self.phase}")
        if player in self.submissions:
            raise DuplicateSubmission(player)
        self.submissions[player] = text
        self._emit(Opcode.SE_SUBMIT, player)
        if len(self.submissions) == 2:
            self._score_round()

    def ack(self, player: str) -> None:
        """A player's ready signal; both acks end a waiting phase early."""
        if player not in self.scores:
            raise NotInMatch(player)
        if self.phase not in (Phase.READING, Phase.ROUND_RESULT):
            raise WrongPhase(f"cannot acknowledge during {self.phase}")
        self._acks.add(player)
        if self._acks == set(self.players):
            self.advance()

    def advance(self) -> None:
        if self.phase is Phase.READING:
            self._enter(Phase.COMPOSING, self.config.composing_seconds)
        elif self.phase is Phase.ROUND_RESULT:
            self._next_round_or_finish()
        else:
            raise WrongPhase(f"cannot advance from {self.phase}")

    def timer_expired(self, token: str) -> None:
        if self.phase is Phase.FINISHED or self.timer is None or self.timer[0] != token:
            return  # stale timer
        if self.phase is Phase.COMPOSING:
            for p in self.players:
                self.submissions.setdefault(p, "")
            self._score_round()
        else:
            self.advance()

    # -- scoring -------------------------------------------------------------

    def _score_round(self) -> None:
        self.phase = Phase.SCORING
        target = self.text.sentences[self.target_index]
        prior = prior_text(self.text, self.target_index)
        try:
            quality = {p: int(self.eval_fn(self.submissions[p], target, prior).score)
                       for p in self.players}
        except Exception:
            # round voided and replayed with the same target
            self._emit(Opcode.ERROR, "EVALUATOR_FAILURE", str(self.round_no))
            self._begin_round(self.round_no, self.stake)
            return
        a, b = self.players
        if quality[a] != quality[b]:
            winner = a if quality[a] > quality[b] else b
            awarded = self.stake
            self.scores[winner] += awarded
            self.awarded_stakes.append(awarded)
            self._next_stake = 1
        else:
            winner = ""
            awarded = 0
            self._next_stake = 2
        self.last_round = (self.round_no,
                           a, self.submissions[a], quality[a],
                           b, self.submissions[b], quality[b],
                           winner, awarded)
        self._emit(Opcode.ROUND_RESULT,
                   a, self.submissions[a], quality[a],
                   b, self.submissions[b], quality[b],
                   winner, awarded, self._next_stake,
                   self.scores[a], self.scores[b])
        self._enter(Phase.ROUND_RESULT, self.config.round_result_seconds)

    def _next_round_or_finish(self) -> None:
        if self.round_no < self.planned_rounds:
            self._begin_round(self.round_no + 1, self._next_stake)
            return
        a, b = self.players
        if self.scores[a] != self.scores[b]:
            winner = a if self.scores[a] > self.scores[b] else b
            self._finish(winner, "completed")
        elif self._bonus_used < self.config.bonus_round_cap:
            # match-level tie: bonus round at stake 2
            self._bonus_used += 1
            self._in_bonus = True
            self.planned_rounds += 1
            self._next_stake = 2
            self._begin_round(self.round_no + 1, 2)
        else:
            self._finish("", "draw")

    def remove_player(self, player: str) -> None:
        if player not in self.scores:
            raise NotInMatch(player)
        if self.phase is Phase.FINISHED:
            # simultaneous drop: the forfeit "winner" also left
            if self.result and self.result[1] == "forfeit" and self.result[0] == player:
                a, b = self.players
                self.result = ("", "abandoned")
                self._emit(Opcode.MATCH_RESULT, "", self.scores[a], self.scores[b], "abandoned")
            return
        other = next(p for p in self.players if p != player)
        self._finish(other, "forfeit")

    def _finish(self, winner: str, reason: str) -> None:
        self.phase = Phase.FINISHED
        self.timer = None
        self.result = (winner, reason)
        a, b = self.players
        self._emit(Opcode.MATCH_RESULT, winner, self.scores[a], self.scores[b], reason)

    # -- observation -----------------------------------------------------------

    def public_state(self) -> dict:
        return {
            "players": list(self.players),
            "scores": dict(self.scores),
            "phase": self.phase.value if self.phase else None,
            "round_no": self.round_no,
            "stake": self.stake,
            "target_index": self.target_index,
            "submitted": sorted(self.submissions.keys()),
            "last_round": self.last_round,
            "result": self.result,
        }
