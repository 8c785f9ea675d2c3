/**
 * Dashboard state as a pure reducer over server events and user actions.
 *
 * Posts are keyed by id with last-write-wins semantics (pushed updates
 * replace rather than duplicate), ordered newest-first. Nothing here
 * recomputes numbers the server already sent.
 */

import type {
  ConnectionStatus,
  ExplanationView,
  Label,
  MetricsView,
  PostView,
} from "./types.js";

export interface DashboardState {
  posts: PostView[]; // newest first
  selectedId: string | null;
  explanations: Record<string, ExplanationView>;
  metrics: MetricsView | null;
  connection: ConnectionStatus;
  inlineErrors: Record<string, string>;
  pending: Record<string, boolean>; // label submissions in flight
}

export const initialState: DashboardState = {
  posts: [],
  selectedId: null,
  explanations: {},
  metrics: null,
  connection: "offline",
  inlineErrors: {},
  pending: {},
};

export type Action =
  | { kind: "posts_loaded"; posts: PostView[] }
  | { kind: "post_pushed"; post: PostView }
  | { kind: "post_selected"; id: string | null }
  | { kind: "explanation_loaded"; explanation: ExplanationView }
  | { kind: "metrics_loaded"; metrics: MetricsView }
  | { kind: "label_pending"; id: string }
  | { kind: "label_accepted"; id: string; label: Label; metrics: MetricsView }
  | { kind: "label_rejected"; id: string; message: string }
  | { kind: "connection_changed"; status: ConnectionStatus };

function upsertNewestFirst(posts: PostView[], post: PostView): PostView[] {
  const existing = posts.findIndex((p) => p.id === post.id);
  if (existing >= 0) {
    const next = posts.slice();
    next[existing] = post;
    return next;
  }
  return [post, ...posts];
}

export function reduce(state: DashboardState, action: Action): DashboardState {
  switch (action.kind) {
    case "posts_loaded":
      return { ...state, posts: action.posts.slice() };
    case "post_pushed":
      return { ...state, posts: upsertNewestFirst(state.posts, action.post) };
    case "post_selected":
      return { ...state, selectedId: action.id };
    case "explanation_loaded":
      return {
        ...state,
        explanations: {
          ...state.explanations,
          [action.explanation.id]: action.explanation,
        },
      };
    case "metrics_loaded":
      return { ...state, metrics: action.metrics };
    case "label_pending":
      return { ...state, pending: { ...state.pending, [action.id]: true } };
    case "label_accepted": {
      const posts = state.posts.map((p) =>
        p.id === action.id ? { ...p, moderator_label: action.label } : p,
      );
      const pending = { ...state.pending };
      delete pending[action.id];
      const inlineErrors = { ...state.inlineErrors };
      delete inlineErrors[action.id];
      return { ...state, posts, pending, inlineErrors, metrics: action.metrics };
    }
    case "label_rejected": {
      const pending = { ...state.pending };
      delete pending[action.id];
      return {
        ...state,
        pending,
        inlineErrors: { ...state.inlineErrors, [action.id]: action.message },
      };
    }
    case "connection_changed":
      return { ...state, connection: action.status };
  }
}

export function selectedPost(state: DashboardState): PostView | null {
  if (state.selectedId === null) return null;
  return state.posts.find((p) => p.id === state.selectedId) ?? null;
}

export function selectedExplanation(state: DashboardState): ExplanationView | null {
  if (state.selectedId === null) return null;
  return state.explanations[state.selectedId] ?? null;
}
