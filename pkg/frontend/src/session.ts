import { ConflictError, type ApiClient } from "./api.js";
import type { RatingRecord, Task, Verdict } from "./types.js";

export interface Draft {
  verdicts: Record<string, Verdict>;
  best: string | null;
  heightMm: number | null;
  widthMm: number | null;
}

export type SubmitOutcome = "stored" | "duplicate" | "queued";

function emptyDraft(): Draft {
  return { verdicts: {}, best: null, heightMm: null, widthMm: null };
}

export function sizeError(value: number | null): string | null {
  if (value === null) return null; // untouched field: gate handles it
  if (!Number.isFinite(value) || value <= 0) return "must be a positive number of mm";
  return null;
}

/** One rater working through the server's task list in order.
 *
 * Submitted records are immutable for the rest of the session; failed
 * submissions stay queued and are retried verbatim, relying on the server's
 * duplicate detection for exactly-once storage. */
export class AnnotationSession {
  readonly rater: string;
  readonly tasks: Task[];
  private cursor = 0;
  private drafts = new Map<string, Draft>();
  private submitted = new Set<string>();
  private pending: RatingRecord[] = [];

  constructor(rater: string, tasks: Task[]) {
    if (!rater.trim()) throw new Error("rater id must be non-empty");
    this.rater = rater;
    this.tasks = tasks;
  }

  get current(): Task | null {
    return this.tasks[this.cursor] ?? null;
  }

  get progress(): { done: number; total: number } {
    return { done: this.cursor, total: this.tasks.length };
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  draft(image: string): Draft {
    let d = this.drafts.get(image);
    if (!d) {
      d = emptyDraft();
      this.drafts.set(image, d);
    }
    return d;
  }

  private editable(image: string): Draft {
    if (this.submitted.has(image)) {
      throw new Error(`rating for ${image} is already submitted`);
    }
    return this.draft(image);
  }

  setVerdict(image: string, token: string, verdict: Verdict): void {
    const task = this.tasks.find((t) => t.image === image);
    if (!task || !task.overlays.includes(token)) {
      throw new Error(`unknown overlay token for ${image}`);
    }
    this.editable(image).verdicts[token] = verdict;
  }

  setBest(image: string, token: string): void {
    const task = this.tasks.find((t) => t.image === image);
    if (!task || !task.overlays.includes(token)) {
      throw new Error(`unknown overlay token for ${image}`);
    }
    this.editable(image).best = token;
  }

  setSize(image: string, heightMm: number | null, widthMm: number | null): void {
    const d = this.editable(image);
    d.heightMm = heightMm;
    d.widthMm = widthMm;
  }

  /** Submit gate: every overlay rated, a best chosen, both sizes valid. */
  isComplete(task: Task): boolean {
    const d = this.draft(task.image);
    return (
      task.overlays.every((tok) => tok in d.verdicts) &&
      d.best !== null &&
      d.heightMm !== null &&
      d.widthMm !== null &&
      sizeError(d.heightMm) === null &&
      sizeError(d.widthMm) === null
    );
  }

  toRecord(task: Task): RatingRecord {
    if (!this.isComplete(task)) {
      throw new Error(`draft for ${task.image} is incomplete`);
    }
    const d = this.draft(task.image);
    return {
      image: task.image,
      rater: this.rater,
      verdicts: { ...d.verdicts },
      best: d.best as string,
      height_mm: d.heightMm as number,
      width_mm: d.widthMm as number,
    };
  }

  /** Submit the current task and advance. Network failures queue the record
   * for retry; validation failures propagate so the UI can show them. */
  async submitCurrent(api: ApiClient): Promise<SubmitOutcome> {
    const task = this.current;
    if (!task) throw new Error("no task to submit");
    const record = this.toRecord(task);
    let outcome: SubmitOutcome;
    try {
      outcome = (await api.submitRating(record)).status;
    } catch (err) {
      if (err instanceof ConflictError) {
        // someone stored a different rating first; surface, do not retry
        throw err;
      }
      if (err instanceof TypeError || (err instanceof Error && err.message.startsWith("submit failed"))) {
        this.pending.push(record);
        outcome = "queued";
      } else {
        throw err;
      }
    }
    this.submitted.add(task.image);
    this.cursor += 1;
    return outcome;
  }

  /** Re-send queued records; resolves to the number still pending. */
  async flushPending(api: ApiClient): Promise<number> {
    const retry = this.pending;
    this.pending = [];
    for (const record of retry) {
      try {
        await api.submitRating(record); // "duplicate" is success here
      } catch (err) {
        if (!(err instanceof ConflictError)) {
          this.pending.push(record);
        }
      }
    }
    return this.pending.length;
  }
}
