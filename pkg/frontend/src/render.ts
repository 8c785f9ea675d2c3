/**
 * DOM renderers. Category color rule: "present" renders red, "absent"
 * renders green; confidence is shown to one decimal, straight from the
 * server's confidence_pct.
 */

import type { DashboardState } from "./state.js";
import { selectedExplanation, selectedPost } from "./state.js";
import type { Label, PostView } from "./types.js";

export interface Handlers {
  onSelect(id: string): void;
  onLabel(id: string, label: Label): void;
}

export function categoryClass(predicted: Label): string {
  return predicted === "present" ? "badge badge-present" : "badge badge-absent";
}

export function confidenceText(post: PostView): string {
  return `${post.confidence_pct.toFixed(1)}%`;
}

function snippet(text: string, max = 120): string {
  return text.length <= max ? text : `${text.slice(0, max - 1)}…`;
}

export function renderPostTable(
  root: HTMLElement,
  state: DashboardState,
  handlers: Handlers,
): void {
  root.textContent = "";
  if (state.posts.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No posts yet — waiting for the stream.";
    root.appendChild(empty);
    return;
  }
  const table = document.createElement("table");
  table.className = "post-table";
  const head = document.createElement("tr");
  for (const title of ["post", "category", "confidence", "label", ""]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const post of state.posts) {
    const row = document.createElement("tr");
    row.dataset.postId = post.id;
    if (post.id === state.selectedId) row.classList.add("selected");

    const textCell = document.createElement("td");
    textCell.className = "post-text";
    textCell.textContent = snippet(post.text);
    if (post.degraded) {
      const mark = document.createElement("span");
      mark.className = "degraded-mark";
      mark.title = "trait extraction degraded";
      mark.textContent = " ⚠";
      textCell.appendChild(mark);
    }
    textCell.addEventListener("click", () => handlers.onSelect(post.id));
    row.appendChild(textCell);

    const badgeCell = document.createElement("td");
    const badge = document.createElement("span");
    badge.className = categoryClass(post.predicted);
    badge.textContent = post.predicted === "present" ? "cyberbullying" : "ok";
    badgeCell.appendChild(badge);
    row.appendChild(badgeCell);

    const confCell = document.createElement("td");
    confCell.className = "confidence";
    confCell.textContent = confidenceText(post);
    row.appendChild(confCell);

    const labelCell = document.createElement("td");
    labelCell.className = "label-state";
    labelCell.textContent = post.moderator_label ?? "—";
    row.appendChild(labelCell);

    const actionCell = document.createElement("td");
    actionCell.className = "actions";
    if (post.moderator_label === null) {
      for (const label of ["absent", "present"] as const) {
        const button = document.createElement("button");
        button.textContent = label === "present" ? "mark bullying" : "mark ok";
        button.className = `label-btn label-${label}`;
        button.disabled = state.pending[post.id] === true ||
          state.connection === "offline";
        button.addEventListener("click", () => handlers.onLabel(post.id, label));
        actionCell.appendChild(button);
      }
    } else {
      const done = document.createElement("span");
      done.className = "labeled-mark";
      done.textContent = "labeled";
      actionCell.appendChild(done);
    }
    const error = state.inlineErrors[post.id];
    if (error) {
      const note = document.createElement("span");
      note.className = "inline-error";
      note.textContent = error;
      actionCell.appendChild(note);
    }
    row.appendChild(actionCell);
    table.appendChild(row);
  }
  root.appendChild(table);
}

export function renderExplanationPanel(root: HTMLElement, state: DashboardState): void {
  root.textContent = "";
  const post = selectedPost(state);
  if (post === null) {
    const hint = document.createElement("p");
    hint.className = "empty-state";
    hint.textContent = "Select a post to see why it was classified.";
    root.appendChild(hint);
    return;
  }
  const header = document.createElement("h2");
  header.textContent = `Why ${post.id} → ${post.predicted} (${confidenceText(post)})`;
  root.appendChild(header);

  const explanation = selectedExplanation(state);
  const body = document.createElement("p");
  body.className = "explanation-text";
  body.textContent = explanation === null ? "Generating explanation…" : explanation.text;
  root.appendChild(body);

  if (explanation?.degraded) {
    const mark = document.createElement("p");
    mark.className = "degraded-banner";
    mark.textContent = "template fallback (explanation backend unavailable)";
    root.appendChild(mark);
  }
}

export function renderMetricsWidget(root: HTMLElement, state: DashboardState): void {
  root.textContent = "";
  const m = state.metrics;
  if (m === null) {
    root.textContent = "metrics: –";
    return;
  }
  const pct = (v: number) => `${(100 * v).toFixed(1)}%`;
  root.textContent =
    `labeled ${m.posts_labeled}/${m.posts_total} · ` +
    `accuracy ${pct(m.accuracy)} · macro-F1 ${pct(m.f1["macro"] ?? 0)}`;
}

export function renderConnectionBanner(root: HTMLElement, state: DashboardState): void {
  root.className = `connection connection-${state.connection}`;
  root.textContent =
    state.connection === "live"
      ? "● live"
      : state.connection === "polling"
        ? "● polling"
        : "● offline — cached view";
}
