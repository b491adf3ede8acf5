// Session state machine. Judgment controls are actionable only in the
// "ready" phase, which is entered after BOTH images of the current pair
// have finished loading; that single guard also makes double submission
// impossible.

import { ConflictError, RatingApi } from "./api.js";
import type { Outcome, PairPayload } from "./types.js";

export type Phase = "idle" | "loading" | "ready" | "submitting" | "error";

export interface PairView {
  /** Show the pair; resolve once both images are fully loaded. */
  displayPair(pair: PairPayload): Promise<void>;
  setPhase(phase: Phase): void;
  setSessionCount(count: number): void;
  /** null means the service totals are unavailable; rating continues. */
  setServiceTotal(total: number | null): void;
  showError(message: string): void;
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export class SessionController {
  private phase: Phase = "idle";
  private pair: PairPayload | null = null;
  private operator = "";
  private judged = 0;

  constructor(
    private readonly api: RatingApi,
    private readonly view: PairView,
  ) {}

  currentPhase(): Phase {
    return this.phase;
  }

  currentPair(): PairPayload | null {
    return this.pair;
  }

  sessionCount(): number {
    return this.judged;
  }

  async start(operator: string): Promise<void> {
    this.operator = operator;
    this.view.setSessionCount(this.judged);
    this.refreshStats();
    await this.advance();
  }

  /** Fetch and present the next pair. */
  async advance(): Promise<void> {
    this.setPhase("loading");
    this.pair = null;
    let pair: PairPayload;
    try {
      pair = await this.api.fetchPair(this.operator);
    } catch (err) {
      this.fail(`Could not fetch the next pair: ${describe(err)}`);
      return;
    }
    await this.present(pair);
  }

  private async present(pair: PairPayload): Promise<void> {
    this.setPhase("loading");
    this.pair = pair;
    try {
      await this.view.displayPair(pair);
    } catch (err) {
      this.fail(`Could not load the images: ${describe(err)}`);
      return;
    }
    this.setPhase("ready");
  }

  /** Record a judgment for the displayed pair, then advance. */
  async judge(outcome: Outcome): Promise<void> {
    if (this.phase !== "ready" || this.pair === null) {
      return; // images still loading, a submission in flight, or no pair
    }
    const pair = this.pair;
    this.setPhase("submitting");
    try {
      await this.api.submitJudgment(pair.comparison_id, outcome);
      this.judged += 1;
      this.view.setSessionCount(this.judged);
      this.refreshStats();
    } catch (err) {
      if (!(err instanceof ConflictError)) {
        this.fail(`Could not record the judgment: ${describe(err)}`);
        return;
      }
      // conflict: the pair expired server-side; move on without counting
    }
    await this.advance();
  }

  /** Re-attempt whatever failed: the current pair if one is held, else a fresh fetch. */
  async retry(): Promise<void> {
    if (this.phase !== "error") {
      return;
    }
    if (this.pair !== null) {
      await this.present(this.pair);
    } else {
      await this.advance();
    }
  }

  /** Abandon the current pair and fetch a new one. */
  async skip(): Promise<void> {
    if (this.phase !== "error") {
      return;
    }
    await this.advance();
  }

  private refreshStats(): void {
    // fire-and-forget: a stats outage must never block rating
    this.api.fetchStats().then(
      (stats) => this.view.setServiceTotal(stats.total_judgments),
      () => this.view.setServiceTotal(null),
    );
  }

  private setPhase(phase: Phase): void {
    this.phase = phase;
    this.view.setPhase(phase);
  }

  private fail(message: string): void {
    this.setPhase("error");
    this.view.showError(message);
  }
}
