/** Review session controller: lease, validate, submit, advance.
 *
 * One active item at a time. Submit is refused client-side whenever the
 * payload would fail the server's structural checks, so a session never
 * produces a 422. Empty-category submissions reject the whole record and
 * therefore require an explicit confirmation flag.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  CategoriesPayload,
  DecisionAck,
  DecisionPayload,
  QueueItemDoc,
  RationalePayload,
  Task,
  VotePayload,
} from "./types.js";
import {
  isValidBinaryLabel,
  isValidVote,
  validateCategories,
  validateRationale,
} from "./validation.js";

export class ValidationBlocked extends Error {
  constructor(public readonly reasons: string[]) {
    super(reasons.join(", "));
    this.name = "ValidationBlocked";
  }
}

export interface SubmitCheck {
  ok: boolean;
  reasons: string[];
}

export interface SubmitOptions {
  /** Required to submit an empty category set, which rejects the record. */
  confirmReject?: boolean;
}

const MAX_RETRIES = 3;
const RETRY_DELAY_MS = 200;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export function checkPayload(
  task: Task,
  payload: DecisionPayload,
  options: SubmitOptions = {},
): SubmitCheck {
  const reasons: string[] = [];
  if (task === "binary") {
    const label = (payload as { label?: unknown }).label;
    if (typeof label !== "string" || !isValidBinaryLabel(label)) {
      reasons.push(`InvalidLabel:${String(label)}`);
    }
  } else if (task === "categories") {
    const categories = (payload as CategoriesPayload).categories ?? [];
    reasons.push(...validateCategories(categories));
    if (categories.length === 0 && !options.confirmReject) {
      reasons.push("EmptySelectionNeedsRejectConfirmation");
    }
  } else if (task === "rationale") {
    const phrases = (payload as RationalePayload).phrases ?? [];
    reasons.push(...validateRationale(phrases));
  } else {
    const vote = (payload as VotePayload).vote;
    if (!isValidVote(vote)) {
      reasons.push(`InvalidVote:${String(vote)}`);
    }
  }
  return { ok: reasons.length === 0, reasons };
}

export class ReviewSession {
  current: QueueItemDoc | null = null;
  decided = 0;

  constructor(
    private readonly api: ApiClient,
    readonly reviewerId: string,
  ) {}

  /** Fetch and lease the next item; null means the task queue is drained. */
  async fetchNext(task: Task): Promise<QueueItemDoc | null> {
    this.current = await this.api.nextItem(task, this.reviewerId);
    return this.current;
  }

  /** Client-side gate mirroring the server's structural checks. */
  canSubmit(payload: DecisionPayload, options: SubmitOptions = {}): SubmitCheck {
    if (this.current === null) {
      return { ok: false, reasons: ["NoItemLeased"] };
    }
    return checkPayload(this.current.task, payload, options);
  }

  /** Submit the decision for the current item and clear it on ack.
   *
   * Throws ValidationBlocked without any network traffic if the payload
   * fails the client-side gate. Transient network failures retry; the
   * lease is preserved server-side in the meantime.
   */
  async submit(
    payload: DecisionPayload,
    options: SubmitOptions = {},
  ): Promise<DecisionAck> {
    const item = this.current;
    if (item === null) {
      throw new ValidationBlocked(["NoItemLeased"]);
    }
    const check = checkPayload(item.task, payload, options);
    if (!check.ok) {
      throw new ValidationBlocked(check.reasons);
    }
    let lastError: unknown = null;
    for (let attempt = 0; attempt < MAX_RETRIES; attempt += 1) {
      try {
        const ack = await this.api.submitDecision(
          item.item_id,
          this.reviewerId,
          payload,
        );
        this.current = null;
        this.decided += 1;
        return ack;
      } catch (err) {
        if (err instanceof ApiError) {
          throw err;
        }
        lastError = err;
        await sleep(RETRY_DELAY_MS * (attempt + 1));
      }
    }
    throw lastError instanceof Error
      ? lastError
      : new Error("submit failed after retries");
  }

  /** Submit, then immediately lease the next item of the same task. */
  async submitAndAdvance(
    payload: DecisionPayload,
    options: SubmitOptions = {},
  ): Promise<QueueItemDoc | null> {
    const task = this.current?.task;
    await this.submit(payload, options);
    if (task === undefined) {
      return null;
    }
    return this.fetchNext(task);
  }
}
