/** Thin typed client over the moderation service HTTP API. */

import type { ExplanationView, Label, MetricsView, PostsPage, PostView } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as T & { error?: string };
    if (!response.ok) {
      throw new ApiError(response.status, payload?.error ?? `HTTP ${response.status}`);
    }
    return payload;
  }

  getPosts(page = 1, pageSize = 50): Promise<PostsPage> {
    return this.request("GET", `/api/posts?page=${page}&page_size=${pageSize}`);
  }

  getPost(id: string): Promise<PostView> {
    return this.request("GET", `/api/posts/${id}`);
  }

  getMetrics(): Promise<MetricsView> {
    return this.request("GET", "/api/metrics");
  }

  getExplanation(id: string): Promise<ExplanationView> {
    return this.request("GET", `/api/posts/${id}/explanation`);
  }

  submitLabel(id: string, label: Label): Promise<MetricsView> {
    return this.request("POST", `/api/posts/${id}/label`, { label });
  }

  ingest(text: string): Promise<PostView> {
    return this.request("POST", "/api/posts", { text });
  }
}
