import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  ChatMessage, ControlMessage, ProtocolError, control, decodeFrame,
  encodeChat, encodeControl,
} from "../src/codec.js";

interface Vector {
  frame: string;
  type: "control" | "chat" | "error";
  opcode?: string;
  fields?: string[];
  sender?: string;
  text?: string;
  error?: string;
}

const vectorsPath = fileURLToPath(new URL("../../conformance/frames.json", import.meta.url));
const vectors: Vector[] = JSON.parse(readFileSync(vectorsPath, "utf-8")).vectors;

describe("shared conformance vectors", () => {
  it("ships a meaningful corpus", () => {
    expect(vectors.length).toBeGreaterThanOrEqual(20);
  });

  for (const vec of vectors) {
    it(`handles ${JSON.stringify(vec.frame)}`, () => {
      if (vec.type === "control") {
        const msg = decodeFrame(vec.frame) as ControlMessage;
        expect(msg.kind).toBe("control");
        expect(msg.opcode).toBe(vec.opcode);
        expect(msg.fields).toEqual(vec.fields);
        expect(encodeControl(msg)).toBe(vec.frame);
      } else if (vec.type === "chat") {
        const msg = decodeFrame(vec.frame) as ChatMessage;
        expect(msg.kind).toBe("chat");
        expect(msg.sender).toBe(vec.sender);
        expect(msg.text).toBe(vec.text);
        expect(encodeChat(msg)).toBe(vec.frame);
      } else {
        let name = "";
        try {
          decodeFrame(vec.frame);
        } catch (err) {
          expect(err).toBeInstanceOf(ProtocolError);
          name = (err as Error).name;
        }
        expect(name).toBe(vec.error);
      }
    });
  }
});

describe("round trips", () => {
  it("survives hostile field content", () => {
    const hostile = ["a|b", "back\\slash", "line\nfeed", "cr\rhere", "", "#!JOIN", "平仮名"];
    const msg = control("SE_SUBMIT", ...hostile);
    const decoded = decodeFrame(encodeControl(msg)) as ControlMessage;
    expect(decoded.fields).toEqual(hostile);
  });

  it("pads chat that impersonates control frames", () => {
    for (const text of ["#!ROLL", " #!ROLL", "   #!x", "plain", " leading space"]) {
      const frame = encodeChat({ kind: "chat", sender: "p1", text });
      expect(frame.startsWith("#!")).toBe(false);
      const decoded = decodeFrame(frame) as ChatMessage;
      expect(decoded.text).toBe(text);
    }
  });

  it("random control messages round-trip", () => {
    const alphabet = "ab|\\\n\r>#! xyz";
    let seed = 1234;
    const rand = () => (seed = (seed * 1103515245 + 12345) % 2147483648) / 2147483648;
    for (let i = 0; i < 2000; i++) {
      const fields = Array.from({ length: Math.floor(rand() * 5) }, () =>
        Array.from({ length: Math.floor(rand() * 12) },
          () => alphabet[Math.floor(rand() * alphabet.length)]).join(""));
      const msg = control("EVENT_CARD", ...fields);
      expect(decodeFrame(encodeControl(msg))).toEqual(msg);
    }
  });

  it("never crashes on garbage", () => {
    const junk = ["", "#!", "#!NOPE", "#!ROLL|bad\\q", "#!ROLL|trail\\", ">lead", "nosep"];
    for (const frame of junk) {
      try {
        decodeFrame(frame);
      } catch (err) {
        expect(err).toBeInstanceOf(ProtocolError);
      }
    }
  });
});
