/** Thin typed client for the review service HTTP API.
 *
 * All state of record lives behind these endpoints; the console holds no
 * authoritative state of its own.
 */

import type {
  DecisionAck,
  DecisionPayload,
  ProgressDoc,
  QueueItemDoc,
  Task,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function raiseForStatus(res: globalThis.Response): Promise<void> {
  if (res.ok) {
    return;
  }
  let detail = res.statusText;
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (body && body.detail !== undefined) {
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    }
  } catch {
    // Non-JSON error body; keep the status text.
  }
  throw new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  /** Lease the next pending item for a task, or null when drained. */
  async nextItem(task: Task, reviewer: string): Promise<QueueItemDoc | null> {
    const url =
      `${this.baseUrl}/queue/next?task=${encodeURIComponent(task)}` +
      `&reviewer=${encodeURIComponent(reviewer)}`;
    const res = await this.fetchImpl(url);
    await raiseForStatus(res);
    const doc = (await res.json()) as QueueItemDoc | { empty: true };
    if ("empty" in doc && doc.empty) {
      return null;
    }
    return doc as QueueItemDoc;
  }

  async submitDecision(
    itemId: string,
    reviewerId: string,
    payload: DecisionPayload,
  ): Promise<DecisionAck> {
    const res = await this.fetchImpl(`${this.baseUrl}/decisions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        item_id: itemId,
        reviewer_id: reviewerId,
        payload,
      }),
    });
    await raiseForStatus(res);
    return (await res.json()) as DecisionAck;
  }

  async getRecord(imgId: string): Promise<Record<string, unknown>> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/records/${encodeURIComponent(imgId)}`,
    );
    await raiseForStatus(res);
    return (await res.json()) as Record<string, unknown>;
  }

  async progress(): Promise<ProgressDoc> {
    const res = await this.fetchImpl(`${this.baseUrl}/progress`);
    await raiseForStatus(res);
    return (await res.json()) as ProgressDoc;
  }

  imageUrl(imgId: string): string {
    return `${this.baseUrl}/static/images/${encodeURIComponent(imgId)}`;
  }
}
