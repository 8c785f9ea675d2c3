/** Wire types mirrored from the moderation service API. */

export type Label = "absent" | "present";

export interface ExplanationView {
  id: string;
  text: string;
  degraded: boolean;
}

export interface PostView {
  id: string;
  text: string;
  predicted: Label;
  proba: Record<Label, number>;
  confidence_pct: number;
  mask_version: number;
  degraded: boolean;
  moderator_label: Label | null;
  explanation: { text: string; degraded: boolean } | null;
}

export interface PostsPage {
  page: number;
  page_size: number;
  total: number;
  posts: PostView[];
}

export interface MetricsView {
  samples_seen: number;
  accuracy: number;
  precision: Record<string, number>;
  recall: Record<string, number>;
  f1: Record<string, number>;
  counts: Record<string, number>;
  mask_version: number;
  posts_total: number;
  posts_labeled: number;
}

export type ConnectionStatus = "live" | "polling" | "offline";
