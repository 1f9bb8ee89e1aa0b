"""Passive replicas that rebuild game state from broadcast control messages.

The engines are server-authoritative; any client (or post-hoc log replay)
can reconstruct the observable state by applying the room's broadcast
stream in order.  The dicts produced here must equal the engines'
``public_state()`` at every action boundary.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from .protocol import ControlMessage, Opcode


class MiBoardReplica:
    def __init__(self, player_ids: List[str]):
        self.players = [{"id": p, "position": 0, "points": 0, "active": True}
                        for p in player_ids]
        self.reader: Optional[str] = None
        self.phase: Optional[str] = None
        self.turn_no = 0
        self.current_card: Optional[str] = None
        self.current_se: Optional[str] = None
        self.idents: Dict[str, tuple] = {}
        self.winner: Optional[str] = None

    def _seat(self, player: str) -> dict:
        return next(p for p in self.players if p["id"] == player)

    def apply(self, msg: ControlMessage) -> None:
        op, f = msg.opcode, msg.fields
        if op == Opcode.TURN_BEGIN:
            self.reader = f[0]
            self.turn_no = int(f[1])
            self.current_card = None
            self.current_se = None
            self.idents = {}
            self.phase = "AWAITING_SE"
        elif op == Opcode.STRAT_CARD:
            self.current_card = f[0]
        elif op == Opcode.SE_SUBMIT:
            self.current_se = f[1]
            self.phase = "IDENTIFICATION"
        elif op == Opcode.IDENT_SUBMIT:
            self.idents[f[0]] = (f[1], f[2], int(f[3]), int(f[4]))
        elif op == Opcode.VERIFY:
            self.phase = "VERIFICATION"
        elif op == Opcode.IDENT_RESULT:
            for player, points in zip(f[1::2], f[2::2]):
                self._seat(player)["points"] += int(points)
            self.phase = "ROLL_MOVE"
        elif op == Opcode.DISCUSS_BEGIN:
            self.phase = "DISCUSSION"
        elif op == Opcode.DISCUSS_END:
            self.phase = "ROLL_MOVE"
        elif op == Opcode.MOVE:
            self._seat(f[0])["position"] = int(f[1])
            self.phase = "EVENT"
        elif op == Opcode.EVENT_CARD:
            self._seat(self.reader)["position"] = int(f[2])
        elif op == Opcode.CONTROL_PASS:
            self.reader = f[0]
        elif op == Opcode.LEAVE:
            self._seat(f[0])["active"] = False
            self.idents.pop(f[0], None)
        elif op == Opcode.GAME_OVER:
            self.phase = "FINISHED"
            self.winner = f[0] or None
        # ROLL, JOIN, START, ERROR carry no replica state

    def state(self) -> dict:
        return {
            "players": [dict(p) for p in self.players],
            "reader": self.reader,
            "phase": self.phase,
            "turn_no": self.turn_no,
            "current_card": self.current_card,
            "current_se": self.current_se,
            "idents": dict(sorted(self.idents.items())),
            "winner": self.winner,
        }


class ShowdownReplica:
    def __init__(self, player_ids: List[str]):
        self.players = list(player_ids)
        self.scores = {p: 0 for p in self.players}
        self.phase: Optional[str] = None
        self.round_no = 0
        self.stake = 1
        self.target_index: Optional[int] = None
        self.submitted: set = set()
        self.last_round: Optional[tuple] = None
        self.result: Optional[tuple] = None

    def apply(self, msg: ControlMessage) -> None:
        op, f = msg.opcode, msg.fields
        if op == Opcode.ROUND_BEGIN:
            self.round_no = int(f[0])
            self.stake = int(f[1])
            self.target_index = int(f[3])
            self.submitted = set()
        elif op == Opcode.TIMER_TICK:
            self.phase = f[0]
        elif op == Opcode.SE_SUBMIT:
            self.submitted.add(f[0])
        elif op == Opcode.ROUND_RESULT:
            a, se_a, q_a, b, se_b, q_b, winner, awarded = f[0], f[1], int(f[2]), f[3], f[4], int(f[5]), f[6], int(f[7])
            self.last_round = (self.round_no, a, se_a, q_a, b, se_b, q_b, winner, awarded)
            self.scores[a] = int(f[9])
            self.scores[b] = int(f[10])
            self.submitted = {a, b}
        elif op == Opcode.MATCH_RESULT:
            self.phase = "FINISHED"
            self.result = (f[0], f[3])

    def state(self) -> dict:
        return {
            "players": list(self.players),
            "scores": dict(self.scores),
            "phase": self.phase,
            "round_no": self.round_no,
            "stake": self.stake,
            "target_index": self.target_index,
            "submitted": sorted(self.submitted),
            "last_round": self.last_round,
            "result": self.result,
        }
