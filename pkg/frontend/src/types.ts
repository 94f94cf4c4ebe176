/** Shared wire types for the review service HTTP API. */

export type Task = "binary" | "categories" | "rationale" | "vote";

export const TASKS: Task[] = ["binary", "categories", "rationale", "vote"];

export interface DraftDoc {
  phrases?: string[];
  origin?: string;
  flags?: string[];
}

export interface RecordContext {
  img_id: string;
  platform: string;
  post_text: string;
  img_text: string | null;
  draft: DraftDoc | null;
}

export interface BinarySuggestion {
  provider_id: string;
  label: string | null;
  confidence: number | null;
}

export interface CategorySuggestion {
  provider_id: string;
  categories: string[];
  confidences: number[];
}

export interface QueueItemDoc {
  item_id: string;
  img_id: string;
  task: Task;
  suggestions: unknown;
  order: number;
  status: string;
  record?: RecordContext;
}

export interface DecisionAck {
  acknowledged: boolean;
  item_id: string;
  outcome: Record<string, unknown>;
}

export interface ProgressDoc {
  stages: Record<string, number>;
  queue: Record<string, number>;
  total: number;
}

export type BinaryPayload = { label: string };
export type CategoriesPayload = { categories: string[] };
export type RationalePayload = { phrases: string[] };
export type VotePayload = { vote: number };
export type DecisionPayload =
  | BinaryPayload
  | CategoriesPayload
  | RationalePayload
  | VotePayload;
