// Single-screen Showdown view state, rebuilt purely from server broadcasts.

import { ControlMessage } from "./codec.js";

export interface RoundResult {
  playerA: string;
  seA: string;
  qualityA: number;
  playerB: string;
  seB: string;
  qualityB: number;
  winner: string; // empty string on a tie
  awarded: number;
}

export interface MatchResult {
  winner: string;
  totalA: number;
  totalB: number;
  reason: "completed" | "draw" | "forfeit" | "abandoned" | string;
}

export type ShowdownPhase = "READING" | "COMPOSING" | "ROUND_RESULT" | "FINISHED" | null;

export class ShowdownView {
  roomId: string | null = null;
  players: string[] = [];
  scores: Record<string, number> = {};
  phase: ShowdownPhase = null;
  phaseSeconds = 0;
  roundNo = 0;
  stake = 1;
  textId: string | null = null;
  targetIndex: number | null = null;
  targetSentence = "";
  priorText = "";
  submitted: Set<string> = new Set();
  lastRound: RoundResult | null = null;
  result: MatchResult | null = null;

  constructor(readonly me: string) {}

  get mySubmissionIn(): boolean {
    return this.submitted.has(this.me);
  }

  get canCompose(): boolean {
    return this.phase === "COMPOSING" && !this.mySubmissionIn;
  }

  apply(msg: ControlMessage): void {
    const f = msg.fields;
    switch (msg.opcode) {
      case "START":
        this.roomId = f[0] ?? null;
        this.players = f.slice(2);
        this.scores = Object.fromEntries(this.players.map((p) => [p, 0]));
        break;
      case "ROUND_BEGIN":
        this.roundNo = Number(f[0]);
        this.stake = Number(f[1]);
        this.textId = f[2] ?? null;
        this.targetIndex = Number(f[3]);
        this.targetSentence = f[4] ?? "";
        this.priorText = f[5] ?? "";
        this.submitted = new Set();
        break;
      case "TIMER_TICK":
        this.phase = (f[0] ?? null) as ShowdownPhase;
        this.phaseSeconds = Number(f[1]);
        break;
      case "SE_SUBMIT":
        if (f[0]) this.submitted.add(f[0]);
        break;
      case "ROUND_RESULT": {
        this.lastRound = {
          playerA: f[0] ?? "", seA: f[1] ?? "", qualityA: Number(f[2]),
          playerB: f[3] ?? "", seB: f[4] ?? "", qualityB: Number(f[5]),
          winner: f[6] ?? "", awarded: Number(f[7]),
        };
        if (f[0]) this.scores[f[0]] = Number(f[9]);
        if (f[3]) this.scores[f[3]] = Number(f[10]);
        break;
      }
      case "MATCH_RESULT":
        this.phase = "FINISHED";
        this.result = {
          winner: f[0] ?? "",
          totalA: Number(f[1]),
          totalB: Number(f[2]),
          reason: f[3] ?? "",
        };
        break;
      default:
        break; // JOIN acks and errors carry no view state
    }
  }
}
