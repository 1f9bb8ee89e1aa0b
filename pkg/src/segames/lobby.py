"""Zones, rooms, and first-fit matchmaking.

A room hosts exactly one game instance.  Matchmaking always picks the
earliest-created room of the requested type that has not started and is
not full; otherwise a new room is created.  Starting a room locks it
against further joins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional


class GameType(str, Enum):
    MIBOARD = "MIBOARD"
    SHOWDOWN = "SHOWDOWN"


# (min_players, max_players) per game type
CAPACITY = {
    GameType.MIBOARD: (3, 4),
    GameType.SHOWDOWN: (2, 2),
}


class LobbyError(Exception):
    pass


class AlreadyInRoom(LobbyError):
    pass


class AlreadyStarted(LobbyError):
    pass


class NotInRoom(LobbyError):
    pass


@dataclass
class Room:
    id: str
    game_type: GameType
    min_players: int
    max_players: int
    players: List[str] = field(default_factory=list)
    started: bool = False
    finished: bool = False

    @property
    def full(self) -> bool:
        return len(self.players) >= self.max_players

    @property
    def joinable(self) -> bool:
        return not self.started and not self.full


class Zone:
    """A named collection of rooms, ordered by creation time."""

    def __init__(self, name: str = "main"):
        self.name = name
        self.rooms: List[Room] = []
        self._next_room = 1

    def room_of(self, player: str) -> Optional[Room]:
        for room in self.rooms:
            if player in room.players:
                return room
        return None

    def get_room(self, room_id: str) -> Optional[Room]:
        for room in self.rooms:
            if room.id == room_id:
                return room
        return None

    def find_or_create_room(self, game_type: GameType, player: str) -> Room:
        if self.room_of(player) is not None:
            raise AlreadyInRoom(player)
        for room in self.rooms:
            if room.game_type == game_type and room.joinable:
                room.players.append(player)
                return room
        lo, hi = CAPACITY[game_type]
        room = Room(id=f"r{self._next_room}", game_type=game_type,
                    min_players=lo, max_players=hi, players=[player])
        self._next_room += 1
        self.rooms.append(room)
        return room

    def try_start(self, room: Room) -> bool:
        if room.started:
            raise AlreadyStarted(room.id)
        if len(room.players) < room.min_players:
            return False
        room.started = True
        return True

    def leave_room(self, room: Room, player: str) -> Room:
        """Pre-start departure; in-game departures are the engines' job."""
        if player not in room.players:
            raise NotInRoom(player)
        room.players.remove(player)
        if not room.started and not room.players:
            self.rooms.remove(room)
        return room

    def release_players(self, room: Room) -> None:
        """Free a finished room's players for new matchmaking."""
        room.finished = True
        room.players.clear()
