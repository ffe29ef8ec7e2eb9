/** Wire types for the annotate service API. Overlay identifiers are opaque
 * tokens; the server never reveals which model variant produced a mask. */

export type Verdict = "good" | "bad";

export interface Task {
  image: string;
  /** Opaque overlay tokens in the server's shuffled presentation order. */
  overlays: string[];
}

export interface TaskList {
  tasks: Task[];
  n_variants: number;
}

/** Record shape accepted by POST /api/ratings (tokens, not variant names). */
export interface RatingRecord {
  image: string;
  rater: string;
  verdicts: Record<string, Verdict>;
  best: string;
  height_mm: number;
  width_mm: number;
}

export interface SubmitResponse {
  status: "stored" | "duplicate";
}
