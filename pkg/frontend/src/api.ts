// Thin fetch client for the review service.
//
// The dashboard is normally served by the same process that answers
// these endpoints, so the default base is the page origin. Non-2xx
// responses become ApiError so callers can branch on the status code:
// a 409 is a plan or rating conflict the UI must surface, not a bug.

import type {
  ApplyResponse,
  ClassPage,
  ClassRow,
  HealthResponse,
  RecommendResponse,
  VerdictResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
  }
}

const JSON_HEADERS = { "content-type": "application/json" };

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = `${res.status} ${res.statusText}`.trim();
    try {
      const body = (await res.json()) as { detail?: unknown };
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class ApiClient {
  private readonly base: string;

  constructor(base = "") {
    this.base = base;
  }

  health(): Promise<HealthResponse> {
    return request(`${this.base}/health`);
  }

  classPage(page: number, pageSize = 50): Promise<ClassPage> {
    return request(`${this.base}/classes?page=${page}&page_size=${pageSize}`);
  }

  /** Walks /classes pages until the reported total has been fetched. */
  async allClasses(pageSize = 50): Promise<ClassRow[]> {
    const rows: ClassRow[] = [];
    let page = 1;
    for (;;) {
      const doc = await this.classPage(page, pageSize);
      rows.push(...doc.classes);
      if (rows.length >= doc.total || doc.classes.length === 0) {
        return rows;
      }
      page += 1;
    }
  }

  recommend(className: string): Promise<RecommendResponse> {
    return request(`${this.base}/recommend`, {
      method: "POST",
      headers: JSON_HEADERS,
      body: JSON.stringify({ class: className }),
    });
  }

  apply(runId: string, index: number): Promise<ApplyResponse> {
    return request(`${this.base}/apply`, {
      method: "POST",
      headers: JSON_HEADERS,
      body: JSON.stringify({ run_id: runId, recommendation_index: index }),
    });
  }

  submitRating(runId: string, index: number, rating: number): Promise<VerdictResponse> {
    return request(`${this.base}/verdict`, {
      method: "POST",
      headers: JSON_HEADERS,
      body: JSON.stringify({ run_id: runId, recommendation_index: index, rating }),
    });
  }
}
