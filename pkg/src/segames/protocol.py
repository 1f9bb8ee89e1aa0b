"""Wire codec multiplexing game-control messages and user chat on one channel.

Every frame is a single line of UTF-8 text (no embedded CR/LF).

Control frames:   "#!" OPCODE ("|" field)*
    field escaping: "\\" -> "\\\\",  "|" -> "\\p",  LF -> "\\n",  CR -> "\\r"

Chat frames:      sender ">" text
    If the text would start with (spaces +) "#!", one extra space is
    inserted after ">" on encode and stripped again on decode, so no chat
    payload is ever mistaken for a control frame.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

CONTROL_PREFIX = "#!"
FIELD_SEP = "|"


class Opcode(str, Enum):
    JOIN = "JOIN"
    LEAVE = "LEAVE"
    START = "START"
    TURN_BEGIN = "TURN_BEGIN"
    STRAT_CARD = "STRAT_CARD"
    SE_SUBMIT = "SE_SUBMIT"
    IDENT_SUBMIT = "IDENT_SUBMIT"
    VERIFY = "VERIFY"
    IDENT_RESULT = "IDENT_RESULT"
    DISCUSS_BEGIN = "DISCUSS_BEGIN"
    DISCUSS_END = "DISCUSS_END"
    ROLL = "ROLL"
    MOVE = "MOVE"
    EVENT_CARD = "EVENT_CARD"
    CONTROL_PASS = "CONTROL_PASS"
    ROUND_BEGIN = "ROUND_BEGIN"
    ROUND_RESULT = "ROUND_RESULT"
    MATCH_RESULT = "MATCH_RESULT"
    TIMER_TICK = "TIMER_TICK"
    GAME_OVER = "GAME_OVER"
    ERROR = "ERROR"


OPCODES = frozenset(op.value for op in Opcode)


class ProtocolError(Exception):
    """Base class for codec errors."""


class InvalidOpcode(ProtocolError):
    pass


class EmptySender(ProtocolError):
    pass


class InvalidSender(ProtocolError):
    """Sender contains '>' / line breaks or starts with the control prefix."""


class InvalidChatText(ProtocolError):
    """Chat text contains a line break; frames are single lines."""


class MalformedControl(ProtocolError):
    pass


class MalformedChat(ProtocolError):
    pass


@dataclass(frozen=True)
class ControlMessage:
    opcode: str
    fields: tuple

    def __init__(self, opcode, fields: Sequence[str] = ()):
        object.__setattr__(self, "opcode", opcode.value if isinstance(opcode, Opcode) else opcode)
        object.__setattr__(self, "fields", tuple(fields))


@dataclass(frozen=True)
class ChatMessage:
    sender: str
    text: str


Message = Union[ControlMessage, ChatMessage]


def control(opcode, *fields: str) -> ControlMessage:
    return ControlMessage(opcode, [str(f) for f in fields])


_ESCAPE_TABLE = {ord("\\"): "\\\\", ord("|"): "\\p", ord("\n"): "\\n", ord("\r"): "\\r"}
_UNESCAPE = {"\\": "\\", "p": "|", "n": "\n", "r": "\r"}


def _escape(field: str) -> str:
    return field.translate(_ESCAPE_TABLE)


def _unescape(field: str) -> str:
    if "\\" not in field:
        return field
    out = []
    i = 0
    while i < len(field):
        ch = field[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(field) or field[i + 1] not in _UNESCAPE:
            raise MalformedControl(f"invalid escape at offset {i} in field {field!r}")
        out.append(_UNESCAPE[field[i + 1]])
        i += 2
    return "".join(out)


def encode_control(msg: ControlMessage) -> str:
    if msg.opcode not in OPCODES:
        raise InvalidOpcode(msg.opcode)
    parts = [CONTROL_PREFIX + msg.opcode]
    parts.extend(_escape(f) for f in msg.fields)
    return FIELD_SEP.join(parts)


# chat text that must be padded so it can never read as a control prefix
_NEEDS_PAD = re.compile(r" *#!")
_HAS_PAD = re.compile(r" +#!")


def encode_chat(msg: ChatMessage) -> str:
    if not msg.sender:
        raise EmptySender("chat sender must be non-empty")
    if ">" in msg.sender or "\n" in msg.sender or "\r" in msg.sender or msg.sender.startswith(CONTROL_PREFIX):
        raise InvalidSender(msg.sender)
    if "\n" in msg.text or "\r" in msg.text:
        raise InvalidChatText("chat text may not contain line breaks")
    text = msg.text
    if _NEEDS_PAD.match(text):
        text = " " + text
    return msg.sender + ">" + text


def decode_frame(frame: str) -> Message:
    if frame.startswith(CONTROL_PREFIX):
        body = frame[len(CONTROL_PREFIX):]
        parts = body.split(FIELD_SEP)
        opcode = parts[0]
        if opcode not in OPCODES:
            raise MalformedControl(f"unknown opcode {opcode!r}")
        return ControlMessage(opcode, [_unescape(p) for p in parts[1:]])
    sep = frame.find(">")
    if sep <= 0:
        raise MalformedChat(f"no sender separator in {frame!r}")
    sender = frame[:sep]
    text = frame[sep + 1:]
    if _HAS_PAD.match(text):
        text = text[1:]
    return ChatMessage(sender, text)
