/** Browser entry point: wires the session controller to the document.
 *
 * All decision logic lives in session.ts/validation.ts; this file only
 * reads form state, dispatches keyboard shortcuts, and swaps rendered
 * HTML in and out of the #app container.
 */

import { ApiClient, ApiError } from "./api.js";
import { ReviewSession, ValidationBlocked } from "./session.js";
import type { DecisionPayload, Task } from "./types.js";
import { splitPhrases, validateRationale, wordCount, WORD_LIMIT } from "./validation.js";
import { keyToAction, renderEmpty, renderItem } from "./view.js";

function readPayload(root: HTMLElement, task: Task): DecisionPayload {
  if (task === "binary") {
    const picked = root.querySelector<HTMLInputElement>("input[name=label]:checked");
    return { label: picked ? picked.value : "" };
  }
  if (task === "categories") {
    const boxes = root.querySelectorAll<HTMLInputElement>("input[name=category]:checked");
    return { categories: Array.from(boxes).map((b) => b.value) };
  }
  if (task === "rationale") {
    const area = root.querySelector<HTMLTextAreaElement>("textarea[name=phrases]");
    return { phrases: splitPhrases(area ? area.value : "") };
  }
  const picked = root.querySelector<HTMLInputElement>("input[name=vote]:checked");
  return { vote: picked ? Number(picked.value) : -1 };
}

function refreshWordCount(root: HTMLElement): void {
  const area = root.querySelector<HTMLTextAreaElement>("textarea[name=phrases]");
  const counter = root.querySelector<HTMLElement>(".word-count");
  if (!area || !counter) {
    return;
  }
  const phrases = splitPhrases(area.value);
  const count = wordCount(phrases);
  counter.textContent = `${count}/${WORD_LIMIT} words`;
  counter.classList.toggle("over-limit", validateRationale(phrases).length > 0);
}

export function boot(): void {
  const app = document.querySelector<HTMLElement>("#app");
  const status = document.querySelector<HTMLElement>("#status");
  if (!app || !status) {
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const reviewer = params.get("reviewer") || "console";
  const task = (params.get("task") || "binary") as Task;
  const session = new ReviewSession(new ApiClient("", fetch.bind(window)), reviewer);

  const show = async (): Promise<void> => {
    const item = await session.fetchNext(task);
    app.innerHTML = item === null ? renderEmpty() : renderItem(item);
    refreshWordCount(app);
  };

  const submitCurrent = async (): Promise<void> => {
    const item = session.current;
    if (item === null) {
      return;
    }
    const payload = readPayload(app, item.task);
    let confirmReject = false;
    if (item.task === "categories" && (payload as { categories: string[] }).categories.length === 0) {
      confirmReject = window.confirm("No categories selected. Reject this record?");
      if (!confirmReject) {
        return;
      }
    }
    try {
      await session.submit(payload, { confirmReject });
      status.textContent = `decided ${session.decided}`;
      await show();
    } catch (err) {
      if (err instanceof ValidationBlocked) {
        status.textContent = `blocked: ${err.reasons.join(", ")}`;
      } else if (err instanceof ApiError && err.status === 410) {
        status.textContent = "lease expired; refetching";
        await show();
      } else {
        status.textContent = String(err);
      }
    }
  };

  document.addEventListener("keydown", (event) => {
    const item = session.current;
    if (item === null || event.target instanceof HTMLTextAreaElement) {
      return;
    }
    const action = keyToAction(event.key, item.task);
    if (action.kind === "submit") {
      void submitCurrent();
    } else if (action.kind === "select-label") {
      const input = app.querySelector<HTMLInputElement>(
        `input[name=label][value=${action.label}]`);
      if (input) input.checked = true;
    } else if (action.kind === "select-vote") {
      const input = app.querySelector<HTMLInputElement>(
        `input[name=vote][value="${action.vote}"]`);
      if (input) input.checked = true;
    } else if (action.kind === "toggle-category") {
      const input = app.querySelector<HTMLInputElement>(
        `input[name=category][value="${action.category}"]`);
      if (input) input.checked = !input.checked;
    }
  });

  app.addEventListener("input", () => refreshWordCount(app));
  document.querySelector("#submit")?.addEventListener("click", () => void submitCurrent());

  void show();
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  boot();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
