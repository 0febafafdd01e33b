// DOM builders for the dashboard.
//
// Data always lands in the page through textContent, so nothing the
// service returns is ever interpreted as markup. The card column is
// repainted in full after every state change; with at most three cards
// that is cheaper than keeping a diffing layer honest.

import type { ClassRow } from "./types.js";
import type { RecommendationView, ReviewSession } from "./state.js";

/** Endpoint labels of the forced-choice rating scale. */
export const RATING_MIN_LABEL = "Very unhelpful";
export const RATING_MAX_LABEL = "Very helpful";

export interface CardHandlers {
  onApply(index: number): void;
  onReject(index: number): void;
  onRate(index: number, rating: number): void;
}

export interface LayoutRefs {
  classList: HTMLElement;
  hostLabel: HTMLElement;
  cardsRegion: HTMLElement;
  toastRegion: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Builds the static page skeleton and returns the regions the app fills. */
export function buildLayout(root: HTMLElement): LayoutRefs {
  root.textContent = "";

  const header = el("header", "app-header");
  header.appendChild(el("h1", undefined, "methodmover"));
  header.appendChild(
    el("p", "subtitle", "Review, apply, and rate MoveMethod recommendations."),
  );
  root.appendChild(header);

  const layout = el("div", "layout");

  const classPanel = el("section", "panel class-panel");
  classPanel.appendChild(el("h2", undefined, "Classes"));
  const classList = el("div", "class-list");
  classPanel.appendChild(classList);
  layout.appendChild(classPanel);

  const reviewPanel = el("section", "panel review-panel");
  const reviewHead = el("div", "review-head");
  reviewHead.appendChild(el("h2", undefined, "Recommendations"));
  const hostLabel = el("span", "host-label");
  reviewHead.appendChild(hostLabel);
  reviewPanel.appendChild(reviewHead);
  const cardsRegion = el("div", "cards");
  cardsRegion.appendChild(
    el("p", "placeholder", "Select a class to request recommendations."),
  );
  reviewPanel.appendChild(cardsRegion);
  layout.appendChild(reviewPanel);

  root.appendChild(layout);

  const toastRegion = el("div", "toasts");
  toastRegion.id = "toasts";
  toastRegion.setAttribute("aria-live", "polite");
  root.appendChild(toastRegion);

  return { classList, hostLabel, cardsRegion, toastRegion };
}

export function renderClassList(
  container: HTMLElement,
  rows: ClassRow[],
  onSelect: (qualifiedName: string) => void,
  selected?: string | null,
): void {
  container.textContent = "";
  if (rows.length === 0) {
    container.appendChild(
      el("div", "empty-state", "No classes indexed. Check the project roots the service was started with."),
    );
    return;
  }
  for (const row of rows) {
    const button = el("button", "class-row");
    button.type = "button";
    button.setAttribute("data-class", row.qualified_name);
    if (row.qualified_name === selected) {
      button.classList.add("active");
    }
    button.appendChild(el("span", "class-name", row.qualified_name));
    const meta = el("span", "class-meta");
    meta.appendChild(
      el("span", `badge badge-${row.stratum.toLowerCase()}`, row.stratum),
    );
    meta.appendChild(el("span", "method-count", `${row.method_count} methods`));
    button.appendChild(meta);
    button.addEventListener("click", () => onSelect(row.qualified_name));
    container.appendChild(button);
  }
}

export function renderLoading(container: HTMLElement, className: string): void {
  container.textContent = "";
  container.appendChild(el("p", "placeholder", `Analyzing ${className}...`));
}

export function renderCards(
  container: HTMLElement,
  session: ReviewSession | null,
  handlers: CardHandlers,
): void {
  container.textContent = "";
  if (session === null) {
    container.appendChild(
      el("p", "placeholder", "Select a class to request recommendations."),
    );
    return;
  }
  if (session.cards.length === 0) {
    const empty = el("div", "empty-state no-moves");
    empty.appendChild(el("strong", undefined, "No refactoring needed"));
    empty.appendChild(
      el("p", undefined, `Every surviving method of ${session.host} looks at home.`),
    );
    container.appendChild(empty);
    return;
  }
  for (const view of session.cards) {
    container.appendChild(buildCard(view, session, handlers));
  }
}

function buildCard(
  view: RecommendationView,
  session: ReviewSession,
  handlers: CardHandlers,
): HTMLElement {
  const card = el("article", "card");
  card.setAttribute("data-index", String(view.index));
  card.setAttribute("data-state", view.state);
  card.setAttribute("data-method", view.method);

  const head = el("div", "card-head");
  head.appendChild(el("span", "rank", `#${view.rank}`));
  head.appendChild(el("code", "method", view.method));
  head.appendChild(
    el("span", `state-badge state-${view.state.toLowerCase()}`, view.state),
  );
  card.appendChild(head);

  const move = el("div", "move-line");
  move.appendChild(el("code", undefined, view.host));
  move.appendChild(el("span", "arrow", "->"));
  move.appendChild(el("code", undefined, view.target));
  card.appendChild(move);

  const routeLine = el("div", "route-line");
  routeLine.appendChild(el("span", "route-badge", view.route));
  routeLine.appendChild(el("code", "new-signature", view.newSignature));
  card.appendChild(routeLine);

  card.appendChild(el("p", "rationale", view.rationale));
  card.appendChild(el("p", "ranking-reason", view.rankingReason));

  const diffLabel = view.state === "APPLIED" ? "diff (merged)" : "diff preview";
  card.appendChild(el("div", "diff-label", diffLabel));
  const pre = el("pre", view.state === "APPLIED" ? "diff merged" : "diff");
  pre.textContent = view.preview;
  card.appendChild(pre);

  card.appendChild(buildActions(view, session, handlers));
  card.appendChild(buildRatingWidget(view, handlers));
  return card;
}

function buildActions(
  view: RecommendationView,
  session: ReviewSession,
  handlers: CardHandlers,
): HTMLElement {
  const actions = el("div", "actions");
  if (view.busy) {
    const busyButton = el("button", "btn btn-apply", "Applying...");
    busyButton.type = "button";
    busyButton.disabled = true;
    actions.appendChild(busyButton);
    return actions;
  }
  if (session.canApply(view.index)) {
    const apply = el("button", "btn btn-apply", "Apply");
    apply.type = "button";
    apply.setAttribute("data-action", "apply");
    apply.addEventListener("click", () => handlers.onApply(view.index));
    actions.appendChild(apply);
  }
  if (session.canReject(view.index)) {
    const reject = el("button", "btn btn-reject", "Reject");
    reject.type = "button";
    reject.setAttribute("data-action", "reject");
    reject.addEventListener("click", () => handlers.onReject(view.index));
    actions.appendChild(reject);
  }
  if (view.locked && view.state === "PENDING") {
    actions.appendChild(
      el("span", "locked-note", "Locked: this method was already moved."),
    );
  }
  return actions;
}

function buildRatingWidget(
  view: RecommendationView,
  handlers: CardHandlers,
): HTMLElement {
  const widget = el("div", "rating");
  widget.setAttribute("role", "group");
  widget.setAttribute("aria-label", "How helpful was this recommendation?");
  widget.appendChild(el("span", "rating-end", RATING_MIN_LABEL));
  for (let value = 1; value <= 6; value += 1) {
    const button = el("button", "btn rating-value", String(value));
    button.type = "button";
    button.setAttribute("data-rating", String(value));
    if (view.rating !== null) {
      button.disabled = true;
      if (view.rating === value) {
        button.classList.add("chosen");
      }
    } else {
      button.addEventListener("click", () => handlers.onRate(view.index, value));
    }
    widget.appendChild(button);
  }
  widget.appendChild(el("span", "rating-end", RATING_MAX_LABEL));
  return widget;
}

export function showToast(
  region: HTMLElement,
  message: string,
  kind: "info" | "error",
): void {
  const toast = el("div", `toast toast-${kind}`, message);
  region.appendChild(toast);
  setTimeout(() => toast.remove(), 4000);
}
