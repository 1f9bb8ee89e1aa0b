// Wire codec. Mirrors the server exactly; the shared conformance vectors
// in ../conformance/frames.json pin both sides to the same byte sequences.

export const OPCODES: ReadonlySet<string> = new Set([
  "JOIN", "LEAVE", "START", "TURN_BEGIN", "STRAT_CARD", "SE_SUBMIT",
  "IDENT_SUBMIT", "VERIFY", "IDENT_RESULT", "DISCUSS_BEGIN", "DISCUSS_END",
  "ROLL", "MOVE", "EVENT_CARD", "CONTROL_PASS", "ROUND_BEGIN", "ROUND_RESULT",
  "MATCH_RESULT", "TIMER_TICK", "GAME_OVER", "ERROR",
]);

export class ProtocolError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

export class InvalidOpcode extends ProtocolError {
  constructor(message: string) { super(message); this.name = "InvalidOpcode"; }
}

export class EmptySender extends ProtocolError {
  constructor(message: string) { super(message); this.name = "EmptySender"; }
}

export class InvalidSender extends ProtocolError {
  constructor(message: string) { super(message); this.name = "InvalidSender"; }
}

export class InvalidChatText extends ProtocolError {
  constructor(message: string) { super(message); this.name = "InvalidChatText"; }
}

export class MalformedControl extends ProtocolError {
  constructor(message: string) { super(message); this.name = "MalformedControl"; }
}

export class MalformedChat extends ProtocolError {
  constructor(message: string) { super(message); this.name = "MalformedChat"; }
}

export interface ControlMessage {
  kind: "control";
  opcode: string;
  fields: string[];
}

export interface ChatMessage {
  kind: "chat";
  sender: string;
  text: string;
}

export type Message = ControlMessage | ChatMessage;

export function control(opcode: string, ...fields: Array<string | number>): ControlMessage {
  return { kind: "control", opcode, fields: fields.map(String) };
}

const UNESCAPE: Record<string, string> = { "\\": "\\", p: "|", n: "\n", r: "\r" };

function escapeField(field: string): string {
  return field
    .replace(/\\/g, "\\\\")
    .replace(/\|/g, "\\p")
    .replace(/\n/g, "\\n")
    .replace(/\r/g, "\\r");
}

function unescapeField(field: string): string {
  if (!field.includes("\\")) return field;
  let out = "";
  for (let i = 0; i < field.length; i++) {
    const ch = field[i];
    if (ch !== "\\") {
      out += ch;
      continue;
    }
    const next = field[i + 1];
    if (next === undefined || !(next in UNESCAPE)) {
      throw new MalformedControl(`invalid escape at offset ${i} in field ${JSON.stringify(field)}`);
    }
    out += UNESCAPE[next];
    i++;
  }
  return out;
}

export function encodeControl(msg: ControlMessage): string {
  if (!OPCODES.has(msg.opcode)) {
    throw new InvalidOpcode(msg.opcode);
  }
  const parts = ["#!" + msg.opcode, ...msg.fields.map(escapeField)];
  return parts.join("|");
}

// chat text that could read as a control prefix is padded with one space
const NEEDS_PAD = /^ *#!/;
const HAS_PAD = /^ +#!/;

export function encodeChat(msg: ChatMessage): string {
  if (msg.sender.length === 0) {
    throw new EmptySender("chat sender must be non-empty");
  }
  if (/[>\n\r]/.test(msg.sender) || msg.sender.startsWith("#!")) {
    throw new InvalidSender(msg.sender);
  }
  if (/[\n\r]/.test(msg.text)) {
    throw new InvalidChatText("chat text may not contain line breaks");
  }
  const text = NEEDS_PAD.test(msg.text) ? " " + msg.text : msg.text;
  return msg.sender + ">" + text;
}

export function decodeFrame(frame: string): Message {
  if (frame.startsWith("#!")) {
    const parts = frame.slice(2).split("|");
    const opcode = parts[0] ?? "";
    if (!OPCODES.has(opcode)) {
      throw new MalformedControl(`unknown opcode ${JSON.stringify(opcode)}`);
    }
    return { kind: "control", opcode, fields: parts.slice(1).map(unescapeField) };
  }
  const sep = frame.indexOf(">");
  if (sep <= 0) {
    throw new MalformedChat(`no sender separator in ${JSON.stringify(frame)}`);
  }
  const sender = frame.slice(0, sep);
  let text = frame.slice(sep + 1);
  if (HAS_PAD.test(text)) {
    text = text.slice(1);
  }
  return { kind: "chat", sender, text };
}
