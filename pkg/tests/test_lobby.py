import random

import pytest

from segames.lobby import (AlreadyInRoom, AlreadyStarted, CAPACITY, GameType,
                           NotInRoom, Zone)


def test_first_fit_skips_started_and_full():
    zone = Zone()
    a = zone.find_or_create_room(GameType.MIBOARD, "p1")
    zone.find_or_create_room(GameType.MIBOARD, "p2")
    zone.find_or_create_room(GameType.MIBOARD, "p3")
    assert zone.try_start(a)
    b = zone.find_or_create_room(GameType.MIBOARD, "p4")
    assert b.id != a.id
    zone.find_or_create_room(GameType.MIBOARD, "p5")
    # B is open with 2/4 players: the next join lands there
    c = zone.find_or_create_room(GameType.MIBOARD, "p6")
    assert c.id == b.id


def test_empty_zone_creates_room():
    zone = Zone()
    room = zone.find_or_create_room(GameType.SHOWDOWN, "p1")
    assert room.players == ["p1"]
    assert len(zone.rooms) == 1


def test_full_open_room_forces_new_room():
    zone = Zone()
    for p in ("p1", "p2", "p3", "p4"):
        room = zone.find_or_create_room(GameType.MIBOARD, p)
    assert len(room.players) == 4 and not room.started
    other = zone.find_or_create_room(GameType.MIBOARD, "p5")
    assert other.id != room.id


def test_game_types_do_not_mix():
    zone = Zone()
    mb = zone.find_or_create_room(GameType.MIBOARD, "p1")
    sd = zone.find_or_create_room(GameType.SHOWDOWN, "p2")
    assert mb.id != sd.id
    assert (mb.min_players, mb.max_players) == (3, 4)
    assert (sd.min_players, sd.max_players) == (2, 2)


def test_already_in_room():
    zone = Zone()
    zone.find_or_create_room(GameType.MIBOARD, "p1")
    with pytest.raises(AlreadyInRoom):
        zone.find_or_create_room(GameType.MIBOARD, "p1")


def test_try_start_thresholds():
    zone = Zone()
    room = zone.find_or_create_room(GameType.MIBOARD, "p1")
    zone.find_or_create_room(GameType.MIBOARD, "p2")
    assert zone.try_start(room) is False
    zone.find_or_create_room(GameType.MIBOARD, "p3")
    assert zone.try_start(room) is True
    with pytest.raises(AlreadyStarted):
        zone.try_start(room)


def test_showdown_starts_at_two():
    zone = Zone()
    room = zone.find_or_create_room(GameType.SHOWDOWN, "p1")
    assert zone.try_start(room) is False
    zone.find_or_create_room(GameType.SHOWDOWN, "p2")
    assert zone.try_start(room) is True


def test_leave_deletes_empty_unstarted_room():
    zone = Zone()
    room = zone.find_or_create_room(GameType.MIBOARD, "p1")
    zone.leave_room(room, "p1")
    assert zone.rooms == []


def test_leave_keeps_nonempty_room():
    zone = Zone()
    room = zone.find_or_create_room(GameType.MIBOARD, "p1")
    zone.find_or_create_room(GameType.MIBOARD, "p2")
    zone.find_or_create_room(GameType.MIBOARD, "p3")
    zone.leave_room(room, "p2")
    assert room.players == ["p1", "p3"]
    assert room in zone.rooms


def test_leave_not_in_room():
    zone = Zone()
    room = zone.find_or_create_room(GameType.MIBOARD, "p1")
    with pytest.raises(NotInRoom):
        zone.leave_room(room, "nobody")


def run_random_sequence(seed: int, ops: int = 40) -> None:
    """Random join/leave/start sequence; checks first-fit, capacity, no-join-after-start."""
    rng = random.Random(seed)
    zone = Zone()
    free = [f"p{i}" for i in range(12)]
    joined = {}  # player -> room id

    for _ in range(ops):
        action = rng.random()
        if action < 0.5 and free:
            player = rng.choice(free)
            game_type = rng.choice([GameType.MIBOARD, GameType.SHOWDOWN])
            expected = next((r.id for r in zone.rooms
                             if r.game_type == game_type and r.joinable), None)
            room = zone.find_or_create_room(game_type, player)
            if expected is not None:
                assert room.id == expected, "first-fit must pick earliest eligible room"
            assert not room.started
            free.remove(player)
            joined[player] = room.id
        elif action < 0.75 and joined:
            player = rng.choice(sorted(joined))
            room = zone.room_of(player)
            if room.started:
                continue  # in-game departures belong to the engines
            zone.leave_room(room, player)
            del joined[player]
            free.append(player)
        elif zone.rooms:
            room = rng.choice(zone.rooms)
            if not room.started:
                started = zone.try_start(room)
                assert started == (len(room.players) >= room.min_players)

        for room in zone.rooms:
            assert len(room.players) <= room.max_players
            lo, hi = CAPACITY[room.game_type]
            assert (room.min_players, room.max_players) == (lo, hi)
            if room.started:
                # no leaves from started rooms in this model, so min holds
                assert len(room.players) >= room.min_players


def test_random_sequences():
    for seed in range(200):
        run_random_sequence(seed)
