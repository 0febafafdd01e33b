// @vitest-environment happy-dom

import { beforeEach, describe, expect, it, vi } from "vitest";
import {
  RATING_MAX_LABEL,
  RATING_MIN_LABEL,
  buildLayout,
  renderCards,
  renderClassList,
  showToast,
  type CardHandlers,
} from "../src/render.js";
import { ReviewSession } from "../src/state.js";
import type { ClassRow, RecommendationDoc, RecommendResponse } from "../src/types.js";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  container = document.createElement("div");
  document.body.appendChild(container);
});

function noopHandlers(): CardHandlers {
  return { onApply: () => {}, onReject: () => {}, onRate: () => {} };
}

function doc(overrides: Partial<RecommendationDoc> = {}): RecommendationDoc {
  return {
    rank: 1,
    method: "resolvePolicy(String)",
    host: "esql.session.EsqlSession",
    target: "esql.enrich.EnrichPolicyResolver",
    route: "field",
    new_signature: "resolvePolicy(String)",
    rationale: "closest responsibility match",
    ranking_reason: "weak cohesion with the host class",
    preview: "--- a/esql/session/EsqlSession.java\n+++ b/esql/enrich/EnrichPolicyResolver.java\n",
    ...overrides,
  };
}

function session(docs: RecommendationDoc[]): ReviewSession {
  const response: RecommendResponse = {
    run_id: "feedcafe0123",
    host: "esql.session.EsqlSession",
    recommendations: docs,
    hallucination_counts: { H1: 0, H2: 0, H3: 0, VALID: docs.length },
    warnings: [],
  };
  return new ReviewSession(response);
}

describe("class list", () => {
  const rows: ClassRow[] = [
    { qualified_name: "esql.session.EsqlSession", kind: "class", method_count: 3, stratum: "SMALL" },
    { qualified_name: "big.Monolith", kind: "class", method_count: 48, stratum: "LARGE" },
  ];

  it("renders one row per class with method count and stratum badge", () => {
    renderClassList(container, rows, () => {});
    const buttons = container.querySelectorAll("[data-class]");
    expect(buttons.length).toBe(2);
    expect(buttons[0]!.textContent).toContain("esql.session.EsqlSession");
    expect(buttons[0]!.textContent).toContain("3 methods");
    expect(buttons[0]!.querySelector(".badge-small")!.textContent).toBe("SMALL");
    expect(buttons[1]!.textContent).toContain("48 methods");
    expect(buttons[1]!.querySelector(".badge-large")!.textContent).toBe("LARGE");
  });

  it("marks the selected row and reports clicks", () => {
    const onSelect = vi.fn();
    renderClassList(container, rows, onSelect, "big.Monolith");
    const active = container.querySelector(".class-row.active")!;
    expect(active.getAttribute("data-class")).toBe("big.Monolith");
    (container.querySelector('[data-class="esql.session.EsqlSession"]') as HTMLElement).click();
    expect(onSelect).toHaveBeenCalledWith("esql.session.EsqlSession");
  });

  it("shows an empty-state panel for a project without classes", () => {
    renderClassList(container, [], () => {});
    expect(container.querySelector(".empty-state")).not.toBeNull();
    expect(container.querySelectorAll("[data-class]").length).toBe(0);
  });
});

describe("recommendation cards", () => {
  it("shows a placeholder before any class is selected", () => {
    renderCards(container, null, noopHandlers());
    expect(container.querySelector(".placeholder")).not.toBeNull();
  });

  it("shows the no-refactoring state for an empty recommendation list", () => {
    renderCards(container, session([]), noopHandlers());
    expect(container.textContent).toContain("No refactoring needed");
    expect(container.querySelectorAll(".card").length).toBe(0);
  });

  it("renders rationale, ranking reason, route and diff on the card", () => {
    renderCards(container, session([doc()]), noopHandlers());
    const card = container.querySelector(".card")!;
    expect(card.getAttribute("data-state")).toBe("PENDING");
    expect(card.textContent).toContain("resolvePolicy(String)");
    expect(card.textContent).toContain("esql.enrich.EnrichPolicyResolver");
    expect(card.textContent).toContain("closest responsibility match");
    expect(card.textContent).toContain("weak cohesion with the host class");
    expect(card.querySelector(".route-badge")!.textContent).toBe("field");
    expect(card.querySelector("pre.diff")!.textContent).toContain("+++ b/esql/enrich");
    expect(card.querySelector('[data-action="apply"]')).not.toBeNull();
    expect(card.querySelector('[data-action="reject"]')).not.toBeNull();
  });

  it("never renders more than three cards", () => {
    const docs = [1, 2, 3, 4].map((rank) => doc({ rank }));
    renderCards(container, session(docs), noopHandlers());
    expect(container.querySelectorAll(".card").length).toBe(3);
  });

  it("routes button clicks to the handlers with the card index", () => {
    const handlers: CardHandlers = {
      onApply: vi.fn(),
      onReject: vi.fn(),
      onRate: vi.fn(),
    };
    renderCards(container, session([doc(), doc({ rank: 2, method: "executeQuery(String)" })]), handlers);
    const cards = container.querySelectorAll(".card");
    (cards[1]!.querySelector('[data-action="apply"]') as HTMLElement).click();
    expect(handlers.onApply).toHaveBeenCalledWith(1);
    (cards[0]!.querySelector('[data-action="reject"]') as HTMLElement).click();
    expect(handlers.onReject).toHaveBeenCalledWith(0);
    (cards[0]!.querySelector('[data-rating="4"]') as HTMLElement).click();
    expect(handlers.onRate).toHaveBeenCalledWith(0, 4);
  });

  it("marks an applied card and its diff as merged, with no action buttons", () => {
    const s = session([doc()]);
    s.beginApply(0);
    s.applySucceeded(0);
    renderCards(container, s, noopHandlers());
    const card = container.querySelector(".card")!;
    expect(card.getAttribute("data-state")).toBe("APPLIED");
    expect(card.querySelector(".diff-label")!.textContent).toBe("diff (merged)");
    expect(card.querySelector("pre.diff.merged")).not.toBeNull();
    expect(card.querySelector('[data-action="apply"]')).toBeNull();
    expect(card.querySelector('[data-action="reject"]')).toBeNull();
  });

  it("disables apply on a locked sibling and explains why", () => {
    const s = session([doc(), doc({ rank: 2, target: "esql.enrich.Policy" })]);
    s.beginApply(0);
    s.applySucceeded(0);
    renderCards(container, s, noopHandlers());
    const sibling = container.querySelectorAll(".card")[1]!;
    expect(sibling.querySelector('[data-action="apply"]')).toBeNull();
    expect(sibling.textContent).toContain("Locked");
  });

  it("shows a disabled in-flight button while an apply is out", () => {
    const s = session([doc()]);
    s.beginApply(0);
    renderCards(container, s, noopHandlers());
    const busy = container.querySelector(".card .btn-apply") as HTMLButtonElement;
    expect(busy.disabled).toBe(true);
    expect(busy.textContent).toBe("Applying...");
  });
});

describe("rating widget", () => {
  it("offers six values with the endpoint labels", () => {
    renderCards(container, session([doc()]), noopHandlers());
    const widget = container.querySelector(".rating")!;
    expect(widget.querySelectorAll("[data-rating]").length).toBe(6);
    expect(widget.textContent).toContain(RATING_MIN_LABEL);
    expect(widget.textContent).toContain(RATING_MAX_LABEL);
  });

  it("locks the scale once a rating was recorded", () => {
    const s = session([doc()]);
    s.setRating(0, 2);
    renderCards(container, s, noopHandlers());
    const buttons = container.querySelectorAll<HTMLButtonElement>("[data-rating]");
    for (const button of buttons) {
      expect(button.disabled).toBe(true);
    }
    expect(container.querySelector('[data-rating="2"]')!.classList.contains("chosen")).toBe(true);
  });
});

describe("layout and toasts", () => {
  it("builds the page regions the app fills in", () => {
    const refs = buildLayout(container);
    expect(container.querySelector(".class-panel")).not.toBeNull();
    expect(container.querySelector(".review-panel")).not.toBeNull();
    expect(refs.toastRegion.id).toBe("toasts");
    expect(refs.cardsRegion.textContent).toContain("Select a class");
  });

  it("appends toast messages of the requested kind", () => {
    const refs = buildLayout(container);
    showToast(refs.toastRegion, "plan is stale", "error");
    const toast = refs.toastRegion.querySelector(".toast.toast-error")!;
    expect(toast.textContent).toBe("plan is stale");
  });
});
