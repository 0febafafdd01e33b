// Wire types for the review service.
//
// Every field below mirrors a JSON field the service actually returns.
// The dashboard renders these values verbatim; nothing on screen is
// derived, guessed, or filled in client-side.

/** One row of GET /classes. */
export interface ClassRow {
  qualified_name: string;
  kind: string;
  /** Non-constructor methods declared on the class. */
  method_count: number;
  /** Size stratum assigned by the service. */
  stratum: "SMALL" | "LARGE";
}

/** Paged response of GET /classes. */
export interface ClassPage {
  classes: ClassRow[];
  total: number;
  page: number;
  page_size: number;
}

/** One recommendation inside a POST /recommend response. */
export interface RecommendationDoc {
  rank: number;
  /** Method signature, e.g. "resolvePolicy(String)". */
  method: string;
  host: string;
  target: string;
  /** Mechanical route the move takes (field, param, static). */
  route: string;
  new_signature: string;
  rationale: string;
  ranking_reason: string;
  /** Unified diff of the move, rendered as-is. */
  preview: string;
}

/** POST /recommend response. */
export interface RecommendResponse {
  run_id: string;
  host: string;
  recommendations: RecommendationDoc[];
  hallucination_counts: Record<string, number>;
  warnings: string[];
}

/** POST /apply response. */
export interface ApplyResponse {
  files_changed: string[];
  call_sites_rewritten: number;
  reparse_ok: boolean;
}

/** POST /verdict response. */
export interface VerdictResponse {
  run_id: string;
  recommendation_index: number;
  rating: number | null;
  applied: boolean;
}

/** GET /health response. */
export interface HealthResponse {
  ok: boolean;
  classes: number;
}
