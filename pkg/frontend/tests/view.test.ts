import { describe, expect, it } from "vitest";

import type { QueueItemDoc } from "../src/types.js";
import {
  escapeHtml,
  keyToAction,
  renderEmpty,
  renderItem,
} from "../src/view.js";

function item(overrides: Partial<QueueItemDoc>): QueueItemDoc {
  return {
    item_id: "m1:binary",
    img_id: "m1",
    task: "binary",
    suggestions: null,
    order: 0,
    status: "pending",
    record: {
      img_id: "m1",
      platform: "x",
      post_text: "some post",
      img_text: "some caption",
      draft: null,
    },
    ...overrides,
  };
}

describe("renderItem", () => {
  it("binary shows exactly two mutually exclusive options", () => {
    const html = renderItem(item({ task: "binary" }));
    const radios = html.match(/input type="radio" name="label"/g) ?? [];
    expect(radios).toHaveLength(2);
    expect(html).toContain('value="hate"');
    expect(html).toContain('value="normal"');
  });

  it("binary lists annotator suggestions", () => {
    const html = renderItem(
      item({
        task: "binary",
        suggestions: [
          { provider_id: "a1", label: "hate", confidence: 0.9 },
          { provider_id: "a2", label: "normal", confidence: 0.8 },
        ],
      }),
    );
    expect(html).toContain("a1: hate");
    expect(html).toContain("a2: normal");
  });

  it("categories pre-checks the majority set and marks other suggestions", () => {
    const html = renderItem(
      item({
        item_id: "m1:categories",
        task: "categories",
        suggestions: [
          { provider_id: "a1", categories: ["race"], confidences: [0.9] },
          { provider_id: "a2", categories: ["race", "violence"], confidences: [0.8, 0.7] },
          { provider_id: "a3", categories: ["race"], confidences: [0.9] },
        ],
      }),
    );
    expect(html).toContain('value="race" checked');
    expect(html).not.toContain('value="violence" checked');
    expect(html).toMatch(/class="suggested"><input type="checkbox" name="category" value="violence"/);
    const boxes = html.match(/type="checkbox"/g) ?? [];
    expect(boxes).toHaveLength(8);
  });

  it("rationale shows the draft with a live word counter", () => {
    const html = renderItem(
      item({
        item_id: "m1:rationale",
        task: "rationale",
        record: {
          img_id: "m1",
          platform: "x",
          post_text: "p",
          img_text: null,
          draft: { phrases: ["mocks the group", "incites violence"] },
        },
      }),
    );
    expect(html).toContain("mocks the group, incites violence");
    expect(html).toContain("5/30 words");
    expect(html).not.toContain("over-limit");
  });

  it("rationale counter flags an over-limit draft", () => {
    const phrase = Array.from({ length: 31 }, (_, i) => `w${i}`).join(" ");
    const html = renderItem(
      item({
        item_id: "m1:rationale",
        task: "rationale",
        record: { img_id: "m1", platform: "x", post_text: "p", img_text: null, draft: { phrases: [phrase] } },
      }),
    );
    expect(html).toContain("31/30 words");
    expect(html).toContain("over-limit");
  });

  it("vote shows agree and oppose", () => {
    const html = renderItem(item({ item_id: "m1:vote", task: "vote" }));
    expect(html).toContain('value="1"');
    expect(html).toContain('value="0"');
  });

  it("escapes record text", () => {
    const html = renderItem(
      item({
        record: {
          img_id: "m1",
          platform: "x",
          post_text: "<script>alert(1)</script>",
          img_text: null,
          draft: null,
        },
      }),
    );
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });

  it("renderEmpty shows the drained state", () => {
    expect(renderEmpty()).toContain("queue drained");
  });
});

describe("escapeHtml", () => {
  it("escapes the five significant characters", () => {
    expect(escapeHtml(`<a href="x" title='y'>&`)).toBe(
      "&lt;a href=&quot;x&quot; title=&#39;y&#39;&gt;&amp;",
    );
  });
});

describe("keyToAction", () => {
  it("maps 1/2 for binary", () => {
    expect(keyToAction("1", "binary")).toEqual({ kind: "select-label", label: "hate" });
    expect(keyToAction("2", "binary")).toEqual({ kind: "select-label", label: "normal" });
  });

  it("maps digits to category toggles in universe order", () => {
    expect(keyToAction("3", "categories")).toEqual({
      kind: "toggle-category",
      category: "race",
    });
    expect(keyToAction("8", "categories")).toEqual({
      kind: "toggle-category",
      category: "international relations",
    });
    expect(keyToAction("9", "categories")).toEqual({ kind: "none" });
  });

  it("maps 1/2 for vote", () => {
    expect(keyToAction("1", "vote")).toEqual({ kind: "select-vote", vote: 1 });
    expect(keyToAction("2", "vote")).toEqual({ kind: "select-vote", vote: 0 });
  });

  it("Enter submits for every task", () => {
    for (const task of ["binary", "categories", "rationale", "vote"] as const) {
      expect(keyToAction("Enter", task)).toEqual({ kind: "submit" });
    }
  });

  it("unmapped keys do nothing", () => {
    expect(keyToAction("x", "binary")).toEqual({ kind: "none" });
    expect(keyToAction("1", "rationale")).toEqual({ kind: "none" });
  });
});
