// Dashboard controller: wires the API client, the session state, and
// the DOM together.
//
// User actions run optimistically only as far as a busy marker; state
// that matters (APPLIED, ratings) is written after the server answered.
// Every async action is tracked so tests can await settled() instead of
// sleeping.

import { ApiClient, ApiError } from "./api.js";
import { ReviewSession } from "./state.js";
import {
  buildLayout,
  renderCards,
  renderClassList,
  renderLoading,
  showToast,
  type CardHandlers,
  type LayoutRefs,
} from "./render.js";
import type { ClassRow } from "./types.js";

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.message;
  }
  return String(err);
}

export class Dashboard {
  private readonly api: ApiClient;
  private readonly root: HTMLElement;
  private refs!: LayoutRefs;
  private classRows: ClassRow[] = [];
  private selected: string | null = null;
  private session: ReviewSession | null = null;
  private inflight: Promise<void> = Promise.resolve();

  constructor(api: ApiClient, root: HTMLElement) {
    this.api = api;
    this.root = root;
  }

  get currentSession(): ReviewSession | null {
    return this.session;
  }

  async start(): Promise<void> {
    this.refs = buildLayout(this.root);
    try {
      this.classRows = await this.api.allClasses();
    } catch (err) {
      showToast(this.refs.toastRegion, describeError(err), "error");
      this.classRows = [];
    }
    this.paintClassList();
  }

  /** Resolves once every action started so far has finished. */
  async settled(): Promise<void> {
    let prev;
    do {
      prev = this.inflight;
      await prev;
    } while (prev !== this.inflight);
  }

  private track(work: Promise<void>): void {
    this.inflight = work.catch((err) => {
      showToast(this.refs.toastRegion, describeError(err), "error");
    });
  }

  private paintClassList(): void {
    renderClassList(
      this.refs.classList,
      this.classRows,
      (name) => this.track(this.selectClass(name)),
      this.selected,
    );
  }

  private handlers(): CardHandlers {
    return {
      onApply: (index) => this.track(this.applyCard(index)),
      onReject: (index) => this.rejectCard(index),
      onRate: (index, rating) => this.track(this.rateCard(index, rating)),
    };
  }

  private repaint(): void {
    renderCards(this.refs.cardsRegion, this.session, this.handlers());
  }

  async selectClass(name: string): Promise<void> {
    this.selected = name;
    this.paintClassList();
    renderLoading(this.refs.cardsRegion, name);
    try {
      const response = await this.api.recommend(name);
      this.session = new ReviewSession(response);
      this.refs.hostLabel.textContent = response.host;
    } catch (err) {
      this.session = null;
      this.refs.hostLabel.textContent = "";
      showToast(this.refs.toastRegion, describeError(err), "error");
    }
    this.repaint();
  }

  async applyCard(index: number): Promise<void> {
    const session = this.session;
    if (!session || !session.canApply(index)) {
      return;
    }
    session.beginApply(index);
    this.repaint();
    try {
      const result = await this.api.apply(session.runId, index);
      session.applySucceeded(index);
      const view = session.card(index);
      showToast(
        this.refs.toastRegion,
        `Moved ${view.method}: ${result.files_changed.length} files changed, ` +
          `${result.call_sites_rewritten} call sites rewritten.`,
        "info",
      );
    } catch (err) {
      session.applyFailed(index);
      showToast(this.refs.toastRegion, describeError(err), "error");
    }
    // The user may have switched classes while the request was out.
    if (this.session === session) {
      this.repaint();
    }
  }

  rejectCard(index: number): void {
    const session = this.session;
    if (!session || !session.canReject(index)) {
      return;
    }
    session.reject(index);
    this.repaint();
  }

  async rateCard(index: number, rating: number): Promise<void> {
    const session = this.session;
    if (!session || !session.canRate(index)) {
      return;
    }
    try {
      await this.api.submitRating(session.runId, index, rating);
      session.setRating(index, rating);
    } catch (err) {
      showToast(this.refs.toastRegion, describeError(err), "error");
    }
    if (this.session === session) {
      this.repaint();
    }
  }
}
