// Scripted Showdown session: joins the queue, acknowledges phase screens,
// and submits a composed self-explanation every round. The UI layer feeds
// incoming frames to handleFrame and binds to the view object.

import { control, decodeFrame, encodeControl } from "./codec.js";
import { ShowdownView } from "./showdown.js";

export interface Transport {
  send(frame: string): void;
}

export interface ComposeContext {
  roundNo: number;
  stake: number;
  targetSentence: string;
  priorText: string;
}

export type Composer = (ctx: ComposeContext) => string;

export class ShowdownSession {
  readonly view: ShowdownView;
  onFinished: (() => void) | null = null;
  onError: ((code: string, detail: string) => void) | null = null;

  constructor(
    readonly player: string,
    private readonly transport: Transport,
    private readonly composer: Composer,
  ) {
    this.view = new ShowdownView(player);
  }

  join(): void {
    this.transport.send(encodeControl(control("JOIN", "SHOWDOWN")));
  }

  handleFrame(frame: string): void {
    const msg = decodeFrame(frame);
    if (msg.kind !== "control") return; // chat renders elsewhere
    this.view.apply(msg);
    switch (msg.opcode) {
      case "TIMER_TICK": {
        const phase = msg.fields[0];
        if (phase === "READING" || phase === "ROUND_RESULT") {
          this.transport.send(encodeControl(control("START"))); // ready-ack
        } else if (phase === "COMPOSING") {
          const se = this.composer({
            roundNo: this.view.roundNo,
            stake: this.view.stake,
            targetSentence: this.view.targetSentence,
            priorText: this.view.priorText,
          });
          this.transport.send(encodeControl(control("SE_SUBMIT", se)));
        }
        break;
      }
      case "MATCH_RESULT":
        this.onFinished?.();
        break;
      case "ERROR":
        this.onError?.(msg.fields[0] ?? "", msg.fields[1] ?? "");
        break;
      default:
        break;
    }
  }
}
