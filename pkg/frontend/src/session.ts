import { ApiClient, ApiError } from "./api";
import type { ReviewCase } from "./types";

export type SubmitOutcome = "advanced" | "rejected" | "offline" | "noop";

/**
 * State machine for one reviewer working through one task's queue.
 *
 * The checkbox set is the single source of truth: whatever is checked is
 * exactly what gets submitted. A case advances only after the server
 * acknowledged the annotation with a 2xx, and each annotate-next cycle
 * performs exactly one POST and one queue GET (the queue keeps one case
 * prefetched so the next report renders immediately).
 */
export class ReviewSession {
  private current: ReviewCase | null = null;
  private next: ReviewCase | null = null;
  private checked = new Set<number>();
  private inFlight = false;

  labels: string[] = [];
  tLow = 0;
  tHigh = 1;
  pending = 0;
  error: string | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly task: string,
    readonly reviewerId: string,
  ) {}

  get currentCase(): ReviewCase | null {
    return this.current;
  }

  get busy(): boolean {
    return this.inFlight;
  }

  /** Initial queue fetch: the head case plus one prefetched follower. */
  async start(): Promise<void> {
    const queue = await this.api.fetchQueue(this.task, 2);
    this.labels = queue.labels;
    this.tLow = queue.t_low;
    this.tHigh = queue.t_high;
    this.pending = queue.pending;
    this.show(queue.cases[0] ?? null);
    this.next = queue.cases[1] ?? null;
  }

  /** Make a case current and pre-check the labels the model is confident about. */
  private show(reviewCase: ReviewCase | null): void {
    this.current = reviewCase;
    this.checked = new Set();
    if (reviewCase) {
      reviewCase.scores.forEach((score, index) => {
        if (score > this.tHigh) this.checked.add(index);
      });
    }
  }

  isChecked(index: number): boolean {
    return this.checked.has(index);
  }

  toggle(index: number): void {
    if (!this.current || index < 0 || index >= this.labels.length) return;
    if (this.checked.has(index)) {
      this.checked.delete(index);
    } else {
      this.checked.add(index);
    }
  }

  /** The visible checkbox state as label names, in schema order. */
  labelSet(): string[] {
    return this.labels.filter((_, index) => this.checked.has(index));
  }

  /**
   * Submit the current form, then advance. On a 4xx the form state stays
   * untouched and the server detail lands in `error`; on a network failure
   * `error` asks for a retry. At most one submission is in flight.
   */
  async submit(): Promise<SubmitOutcome> {
    if (!this.current || this.inFlight) return "noop";
    this.inFlight = true;
    this.error = null;
    const submitted = this.current;
    try {
      const response = await this.api.submitAnnotation(
        this.task,
        submitted.id,
        this.reviewerId,
        this.labelSet(),
      );
      this.pending = response.pending;
      this.show(this.next);
      const queue = await this.api.fetchQueue(this.task, 2);
      this.pending = queue.pending;
      const head = queue.cases[0] ?? null;
      if (!this.current || !head || head.id !== this.current.id) {
        // queue moved under us (another reviewer, or nothing prefetched)
        this.show(head);
        this.next = queue.cases[1] ?? null;
      } else {
        this.next = queue.cases[1] ?? null;
      }
      return "advanced";
    } catch (failure) {
      if (failure instanceof ApiError) {
        this.error = `${failure.status}: ${failure.message}`;
        return "rejected";
      }
      this.error = "offline? submission failed, retry with Enter";
      return "offline";
    } finally {
      this.inFlight = false;
    }
  }
}
