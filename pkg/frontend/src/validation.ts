/** Client-side structural validation.
 *
 * Mirrors the server's rationale and category rules so the console never
 * sends a payload the service would reject with 422.
 */

export const CATEGORY_UNIVERSE = [
  "religion",
  "politics",
  "race",
  "gender",
  "health status",
  "violence",
  "public health",
  "international relations",
] as const;

export const WORD_LIMIT = 30;

export const EMPTY_RATIONALE = "EmptyRationale";
export const EMPTY_PHRASE = "EmptyPhrase";
export const PHRASE_HAS_COMMA = "PhraseHasComma";
export const PHRASE_TOO_SHORT = "PhraseTooShort";
export const WORD_LIMIT_EXCEEDED = "WordLimitExceeded";

export function wordCount(phrases: string[]): number {
  let total = 0;
  for (const p of phrases) {
    const tokens = p.trim().split(/\s+/).filter((t) => t.length > 0);
    total += tokens.length;
  }
  return total;
}

/** Violation codes in server order; an empty array means valid. */
export function validateRationale(phrases: string[]): string[] {
  const violations: string[] = [];
  if (phrases.length === 0) {
    violations.push(EMPTY_RATIONALE);
    return violations;
  }
  for (const phrase of phrases) {
    const trimmed = phrase.trim();
    if (!trimmed) {
      violations.push(EMPTY_PHRASE);
      continue;
    }
    if (trimmed.includes(",")) {
      violations.push(PHRASE_HAS_COMMA);
    }
    if (trimmed.split(/\s+/).length < 2) {
      violations.push(PHRASE_TOO_SHORT);
    }
  }
  if (wordCount(phrases) > WORD_LIMIT) {
    violations.push(WORD_LIMIT_EXCEEDED);
  }
  return violations;
}

/** Comma-splitting used when the editor types free text. */
export function splitPhrases(text: string): string[] {
  return text
    .replace(/\n/g, " ")
    .split(",")
    .map((p) => p.trim())
    .filter((p) => p.length > 0);
}

export function isKnownCategory(name: string): boolean {
  return (CATEGORY_UNIVERSE as readonly string[]).includes(name);
}

/** Violations for a category selection; empty selection is structurally
 * legal (it rejects the record) and is gated by an explicit confirmation
 * in the session instead. */
export function validateCategories(categories: string[]): string[] {
  const violations: string[] = [];
  const seen = new Set<string>();
  for (const c of categories) {
    if (!isKnownCategory(c)) {
      violations.push(`UnknownCategory:${c}`);
    }
    if (seen.has(c)) {
      violations.push(`DuplicateCategory:${c}`);
    }
    seen.add(c);
  }
  return violations;
}

/** Categories named by at least two providers, in universe order. This is
 * the same majority-membership rule the server's auto consensus applies,
 * used here to pre-check boxes. */
export function majoritySuggestions(
  suggestions: { categories: string[] }[],
): string[] {
  const counts = new Map<string, number>();
  for (const s of suggestions) {
    for (const c of new Set(s.categories)) {
      counts.set(c, (counts.get(c) ?? 0) + 1);
    }
  }
  return (CATEGORY_UNIVERSE as readonly string[]).filter(
    (c) => (counts.get(c) ?? 0) >= 2,
  );
}

export function isValidBinaryLabel(label: string): boolean {
  return label === "hate" || label === "normal";
}

export function isValidVote(vote: number): boolean {
  return vote === 0 || vote === 1;
}
