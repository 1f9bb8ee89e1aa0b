// View model for the identification form: pick a strategy card, pick a
// reason belonging to it, and highlight the span of the self-explanation
// that justifies the pick. Submit stays disabled until all three are set.

import { control, encodeControl } from "./codec.js";

export interface ReasonOption {
  id: string;
  text: string;
}

export interface StrategyOption {
  id: string;
  name: string;
  reasons: ReasonOption[];
}

export interface Highlight {
  start: number;
  end: number;
}

export class CmbForm {
  private strategyId: string | null = null;
  private reasonId: string | null = null;
  private highlight: Highlight | null = null;

  constructor(
    private readonly strategies: StrategyOption[],
    private readonly seLength: number,
  ) {
    if (strategies.length === 0) throw new Error("no strategies to choose from");
    if (seLength <= 0) throw new Error("nothing to highlight");
  }

  get selectedStrategy(): string | null {
    return this.strategyId;
  }

  get selectedReason(): string | null {
    return this.reasonId;
  }

  get selectedHighlight(): Highlight | null {
    return this.highlight;
  }

  /** Reasons shown for the current strategy; empty until one is picked. */
  get reasonOptions(): ReasonOption[] {
    const strategy = this.strategies.find((s) => s.id === this.strategyId);
    return strategy ? strategy.reasons : [];
  }

  selectStrategy(id: string): void {
    const strategy = this.strategies.find((s) => s.id === id);
    if (!strategy) throw new Error(`unknown strategy ${id}`);
    if (this.strategyId !== id) {
      this.strategyId = id;
      // a reason belongs to one strategy; switching cards resets the pick
      this.reasonId = null;
    }
  }

  selectReason(id: string): void {
    if (!this.reasonOptions.some((r) => r.id === id)) {
      throw new Error(`reason ${id} does not belong to the selected strategy`);
    }
    this.reasonId = id;
  }

  setHighlight(start: number, end: number): void {
    if (!Number.isInteger(start) || !Number.isInteger(end)
        || start < 0 || end > this.seLength || start >= end) {
      throw new Error(`highlight ${start}..${end} is out of range`);
    }
    this.highlight = { start, end };
  }

  clearHighlight(): void {
    this.highlight = null;
  }

  /** The submit button binds to this. */
  get canSubmit(): boolean {
    return this.strategyId !== null && this.reasonId !== null && this.highlight !== null;
  }

  buildFrame(): string {
    if (!this.canSubmit || !this.strategyId || !this.reasonId || !this.highlight) {
      throw new Error("identification is incomplete");
    }
    return encodeControl(control(
      "IDENT_SUBMIT", this.strategyId, this.reasonId,
      this.highlight.start, this.highlight.end,
    ));
  }
}
