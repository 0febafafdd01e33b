// Review session state, kept apart from the DOM so the rules are
// testable without a browser.
//
// The transitions encode what the dashboard must never do on its own:
// a card becomes APPLIED only after the server confirmed the apply, a
// rating is write-once, and a landed move locks sibling cards for the
// same method. Apply requests are reconciled against the server, so a
// failed apply always returns the card to exactly where it was.

import type { RecommendResponse } from "./types.js";

export type CardState = "PENDING" | "APPLIED" | "REJECTED";

/** Hard ceiling on cards per class view. */
export const MAX_CARDS = 3;

export interface RecommendationView {
  runId: string;
  /** Index used to address this recommendation in /apply and /verdict. */
  index: number;
  rank: number;
  method: string;
  host: string;
  target: string;
  route: string;
  newSignature: string;
  rationale: string;
  rankingReason: string;
  preview: string;
  state: CardState;
  rating: number | null;
  /** Set when a sibling move of the same method landed. */
  locked: boolean;
  /** An /apply request is in flight. */
  busy: boolean;
}

export class ReviewSession {
  readonly runId: string;
  readonly host: string;
  readonly cards: RecommendationView[];

  constructor(response: RecommendResponse) {
    this.runId = response.run_id;
    this.host = response.host;
    // The service caps its output at three already; trimming again here
    // keeps the view bounded even against a misbehaving backend.
    this.cards = response.recommendations.slice(0, MAX_CARDS).map((doc, i) => ({
      runId: response.run_id,
      index: i,
      rank: doc.rank,
      method: doc.method,
      host: doc.host,
      target: doc.target,
      route: doc.route,
      newSignature: doc.new_signature,
      rationale: doc.rationale,
      rankingReason: doc.ranking_reason,
      preview: doc.preview,
      state: "PENDING",
      rating: null,
      locked: false,
      busy: false,
    }));
  }

  card(index: number): RecommendationView {
    const view = this.cards[index];
    if (!view) {
      throw new RangeError(`no recommendation at index ${index}`);
    }
    return view;
  }

  /** A card accepts an apply click only while pending, unlocked and idle. */
  canApply(index: number): boolean {
    const view = this.card(index);
    return view.state === "PENDING" && !view.locked && !view.busy;
  }

  canReject(index: number): boolean {
    const view = this.card(index);
    return view.state === "PENDING" && !view.busy;
  }

  /** A rating can be submitted once, in any card state. */
  canRate(index: number): boolean {
    return this.card(index).rating === null;
  }

  beginApply(index: number): void {
    if (!this.canApply(index)) {
      throw new Error(`recommendation ${index} cannot be applied`);
    }
    this.card(index).busy = true;
  }

  /**
   * Records a server-confirmed apply. Sibling cards proposing the same
   * method are locked; their plans moved out from under them.
   */
  applySucceeded(index: number): void {
    const view = this.card(index);
    if (!view.busy) {
      throw new Error(`recommendation ${index} has no apply in flight`);
    }
    view.busy = false;
    view.state = "APPLIED";
    for (const other of this.cards) {
      if (other !== view && other.method === view.method && other.state === "PENDING") {
        other.locked = true;
      }
    }
  }

  /** Rolls the card back to the state it had before the apply click. */
  applyFailed(index: number): void {
    const view = this.card(index);
    if (!view.busy) {
      throw new Error(`recommendation ${index} has no apply in flight`);
    }
    view.busy = false;
  }

  reject(index: number): void {
    if (!this.canReject(index)) {
      throw new Error(`recommendation ${index} cannot be rejected`);
    }
    this.card(index).state = "REJECTED";
  }

  setRating(index: number, rating: number): void {
    if (!Number.isInteger(rating) || rating < 1 || rating > 6) {
      throw new RangeError(`rating must be an integer in 1..6, got ${rating}`);
    }
    const view = this.card(index);
    if (view.rating !== null) {
      if (view.rating === rating) {
        return; // resubmitting the same value is harmless
      }
      throw new Error(`recommendation ${index} is already rated ${view.rating}`);
    }
    view.rating = rating;
  }
}
