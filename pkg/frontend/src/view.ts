/** Pure rendering: queue items to HTML strings, keys to actions.
 *
 * No DOM access here; main.ts owns the document. Keeping the renderers
 * pure makes them testable without a browser.
 */

import type {
  BinarySuggestion,
  CategorySuggestion,
  QueueItemDoc,
  Task,
} from "./types.js";
import {
  CATEGORY_UNIVERSE,
  WORD_LIMIT,
  majoritySuggestions,
  wordCount,
} from "./validation.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function imageBlock(imgId: string): string {
  // onerror swaps in a placeholder; submission stays possible either way.
  return (
    `<img class="meme" src="/static/images/${encodeURIComponent(imgId)}" ` +
    `alt="meme ${escapeHtml(imgId)}" ` +
    `onerror="this.outerHTML='<div class=&quot;placeholder&quot;>image unavailable</div>'">`
  );
}

function contextBlock(item: QueueItemDoc): string {
  const record = item.record;
  const post = record ? escapeHtml(record.post_text) : "";
  const imgText = record && record.img_text ? escapeHtml(record.img_text) : "";
  return (
    `<section class="context">` +
    imageBlock(item.img_id) +
    `<p class="post-text">${post}</p>` +
    (imgText ? `<p class="img-text">${imgText}</p>` : "") +
    `</section>`
  );
}

export function renderBinary(item: QueueItemDoc): string {
  const suggestions = (item.suggestions as BinarySuggestion[] | null) ?? [];
  const rows = suggestions
    .map(
      (s) =>
        `<li class="suggestion">${escapeHtml(s.provider_id)}: ` +
        `${escapeHtml(s.label ?? "?")}</li>`,
    )
    .join("");
  return (
    contextBlock(item) +
    `<section class="choices" data-task="binary">` +
    `<label><input type="radio" name="label" value="hate"> [1] Hate</label>` +
    `<label><input type="radio" name="label" value="normal"> [2] Normal</label>` +
    `<ul class="suggestions">${rows}</ul>` +
    `</section>`
  );
}

export function renderCategories(item: QueueItemDoc): string {
  const suggestions = (item.suggestions as CategorySuggestion[] | null) ?? [];
  const majority = new Set(majoritySuggestions(suggestions));
  const suggested = new Set<string>();
  for (const s of suggestions) {
    for (const c of s.categories) {
      suggested.add(c);
    }
  }
  const boxes = CATEGORY_UNIVERSE.map((category, i) => {
    const checked = majority.has(category) ? " checked" : "";
    const cls = suggested.has(category) && !majority.has(category) ? ` class="suggested"` : "";
    return (
      `<label${cls}><input type="checkbox" name="category" ` +
      `value="${escapeHtml(category)}"${checked}> [${i + 1}] ${escapeHtml(category)}</label>`
    );
  }).join("");
  return (
    contextBlock(item) +
    `<section class="choices" data-task="categories">${boxes}` +
    `<p class="hint">Submitting with nothing checked rejects the record.</p>` +
    `</section>`
  );
}

export function renderRationale(item: QueueItemDoc): string {
  const phrases = item.record?.draft?.phrases ?? [];
  const count = wordCount(phrases);
  const over = count > WORD_LIMIT ? " over-limit" : "";
  return (
    contextBlock(item) +
    `<section class="choices" data-task="rationale">` +
    `<textarea name="phrases">${escapeHtml(phrases.join(", "))}</textarea>` +
    `<span class="word-count${over}">${count}/${WORD_LIMIT} words</span>` +
    `</section>`
  );
}

export function renderVote(item: QueueItemDoc): string {
  return (
    contextBlock(item) +
    `<section class="choices" data-task="vote">` +
    `<label><input type="radio" name="vote" value="1"> [1] Agree</label>` +
    `<label><input type="radio" name="vote" value="0"> [2] Oppose</label>` +
    `</section>`
  );
}

export function renderItem(item: QueueItemDoc): string {
  switch (item.task) {
    case "binary":
      return renderBinary(item);
    case "categories":
      return renderCategories(item);
    case "rationale":
      return renderRationale(item);
    case "vote":
      return renderVote(item);
  }
}

export function renderEmpty(): string {
  return `<section class="empty">queue drained</section>`;
}

export type KeyAction =
  | { kind: "select-label"; label: "hate" | "normal" }
  | { kind: "toggle-category"; category: string }
  | { kind: "select-vote"; vote: 0 | 1 }
  | { kind: "submit" }
  | { kind: "none" };

/** Keyboard-first mapping: 1/2 for binary and vote, 1-8 toggles the
 * corresponding category, Enter submits. */
export function keyToAction(key: string, task: Task): KeyAction {
  if (key === "Enter") {
    return { kind: "submit" };
  }
  if (task === "binary") {
    if (key === "1") return { kind: "select-label", label: "hate" };
    if (key === "2") return { kind: "select-label", label: "normal" };
  } else if (task === "categories") {
    const index = Number.parseInt(key, 10);
    if (index >= 1 && index <= CATEGORY_UNIVERSE.length) {
      return { kind: "toggle-category", category: CATEGORY_UNIVERSE[index - 1] };
    }
  } else if (task === "vote") {
    if (key === "1") return { kind: "select-vote", vote: 1 };
    if (key === "2") return { kind: "select-vote", vote: 0 };
  }
  return { kind: "none" };
}
