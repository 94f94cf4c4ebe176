import { describe, expect, it } from "vitest";

import {
  CATEGORY_UNIVERSE,
  EMPTY_PHRASE,
  EMPTY_RATIONALE,
  PHRASE_HAS_COMMA,
  PHRASE_TOO_SHORT,
  WORD_LIMIT,
  WORD_LIMIT_EXCEEDED,
  isValidBinaryLabel,
  isValidVote,
  majoritySuggestions,
  splitPhrases,
  validateCategories,
  validateRationale,
  wordCount,
} from "../src/validation.js";

function wordsPhrase(n: number): string {
  return Array.from({ length: n }, (_, i) => `w${i}`).join(" ");
}

describe("validateRationale", () => {
  it("accepts a simple verb-object phrase list", () => {
    expect(validateRationale(["mocks the group", "incites violence"])).toEqual([]);
  });

  it("rejects an empty list", () => {
    expect(validateRationale([])).toEqual([EMPTY_RATIONALE]);
  });

  it("rejects a blank phrase", () => {
    expect(validateRationale(["mocks the group", "   "])).toContain(EMPTY_PHRASE);
  });

  it("rejects a phrase containing a comma", () => {
    expect(validateRationale(["mocks, the group"])).toContain(PHRASE_HAS_COMMA);
  });

  it("rejects a single-word phrase", () => {
    expect(validateRationale(["mocks"])).toContain(PHRASE_TOO_SHORT);
  });

  it("accepts exactly the word limit", () => {
    expect(validateRationale([wordsPhrase(WORD_LIMIT)])).toEqual([]);
  });

  it("rejects one word over the limit", () => {
    expect(validateRationale([wordsPhrase(WORD_LIMIT + 1)])).toEqual([
      WORD_LIMIT_EXCEEDED,
    ]);
  });

  it("budgets the limit across phrases", () => {
    const phrases = [wordsPhrase(16), wordsPhrase(15)];
    expect(wordCount(phrases)).toBe(31);
    expect(validateRationale(phrases)).toEqual([WORD_LIMIT_EXCEEDED]);
  });
});

describe("splitPhrases", () => {
  it("splits on commas and trims", () => {
    expect(splitPhrases(" mocks the group , incites violence ")).toEqual([
      "mocks the group",
      "incites violence",
    ]);
  });

  it("drops empty fragments and folds newlines", () => {
    expect(splitPhrases("a b,\n, c d,")).toEqual(["a b", "c d"]);
  });
});

describe("validateCategories", () => {
  it("accepts subsets of the universe", () => {
    expect(validateCategories(["race", "public health"])).toEqual([]);
  });

  it("accepts the empty selection structurally", () => {
    expect(validateCategories([])).toEqual([]);
  });

  it("rejects names outside the universe", () => {
    expect(validateCategories(["sports"])).toEqual(["UnknownCategory:sports"]);
  });

  it("rejects duplicates", () => {
    expect(validateCategories(["race", "race"])).toEqual(["DuplicateCategory:race"]);
  });
});

describe("majoritySuggestions", () => {
  it("keeps categories named by at least two providers", () => {
    const out = majoritySuggestions([
      { categories: ["race"] },
      { categories: ["race", "violence"] },
      { categories: ["race"] },
    ]);
    expect(out).toEqual(["race"]);
  });

  it("returns universe order", () => {
    const out = majoritySuggestions([
      { categories: ["violence", "religion"] },
      { categories: ["violence", "religion"] },
    ]);
    expect(out).toEqual(["religion", "violence"]);
  });

  it("counts each provider's set once even with duplicates", () => {
    const out = majoritySuggestions([
      { categories: ["race", "race"] },
      { categories: [] },
    ]);
    expect(out).toEqual([]);
  });
});

describe("scalar validators", () => {
  it("binary labels", () => {
    expect(isValidBinaryLabel("hate")).toBe(true);
    expect(isValidBinaryLabel("normal")).toBe(true);
    expect(isValidBinaryLabel("Hate")).toBe(false);
    expect(isValidBinaryLabel("")).toBe(false);
  });

  it("votes", () => {
    expect(isValidVote(0)).toBe(true);
    expect(isValidVote(1)).toBe(true);
    expect(isValidVote(2)).toBe(false);
    expect(isValidVote(-1)).toBe(false);
  });

  it("category universe has the eight canonical names", () => {
    expect(CATEGORY_UNIVERSE).toHaveLength(8);
    expect(CATEGORY_UNIVERSE).toContain("international relations");
  });
});
