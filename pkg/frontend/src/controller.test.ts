// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "./api.js";
import type { DashboardRoots } from "./controller.js";
import { createDashboard } from "./controller.js";
import { makeMetrics, makePost } from "./state.test.js";
import type { ConnectionStatus, PostView } from "./types.js";

function roots(): DashboardRoots {
  document.body.textContent = "";
  const make = (id: string) => {
    const el = document.createElement("div");
    el.id = id;
    document.body.appendChild(el);
    return el;
  };
  return {
    posts: make("posts"),
    explanation: make("explanation"),
    metrics: make("metrics"),
    connection: make("connection"),
  };
}

interface StubbedBackend {
  api: ApiClient;
  calls: { method: string; url: string; body?: unknown }[];
  pushPost(post: PostView): void;
  pushStatus(status: ConnectionStatus): void;
}

function stubBackend(options: {
  posts?: PostView[];
  explanationText?: string;
  labelStatus?: number;
} = {}): StubbedBackend {
  const calls: StubbedBackend["calls"] = [];
  const metrics = makeMetrics({ accuracy: 0.5, posts_labeled: 1 });
  const fetchStub = vi.fn(async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ method, url, body });
    const respond = (status: number, payload: unknown) =>
      new Response(JSON.stringify(payload), { status });

    if (url.startsWith("/api/posts?")) {
      return respond(200, {
        page: 1,
        page_size: 50,
        total: options.posts?.length ?? 0,
        posts: options.posts ?? [],
      });
    }
    if (url === "/api/metrics") return respond(200, makeMetrics());
    if (url.endsWith("/label")) {
      if (options.labelStatus && options.labelStatus !== 200) {
        return respond(options.labelStatus, { error: "duplicate label" });
      }
      return respond(200, metrics);
    }
    if (url.endsWith("/explanation")) {
      const id = url.split("/")[3]!;
      return respond(200, {
        id,
        text: options.explanationText ?? "because the trait flags fired",
        degraded: false,
      });
    }
    return respond(404, { error: `no stub for ${url}` });
  });

  let onPost: (post: PostView) => void = () => {};
  let onStatus: (status: ConnectionStatus) => void = () => {};
  const api = new ApiClient("", fetchStub as unknown as typeof fetch);
  return {
    api,
    calls,
    pushPost: (post) => onPost(post),
    pushStatus: (status) => onStatus(status),
    connect(onPostCb: typeof onPost, onStatusCb: typeof onStatus) {
      onPost = onPostCb;
      onStatus = onStatusCb;
      return { stop() {} };
    },
  } as StubbedBackend & { connect: unknown } as StubbedBackend;
}

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function boot(backend: StubbedBackend) {
  const r = roots();
  const controller = createDashboard(
    r,
    backend.api,
    (onPost, onStatus) =>
      (backend as unknown as { connect: Function }).connect(onPost, onStatus),
  );
  return { r, controller };
}

describe("dashboard contract", () => {
  beforeEach(() => {
    document.body.textContent = "";
  });

  it("label button click fires exactly one POST and refreshes the metrics widget", async () => {
    const backend = stubBackend({ posts: [makePost({ id: "p1" })] });
    const { r } = boot(backend);
    await flush();
    backend.pushStatus("live");  // offline keeps the controls disabled

    const button = r.posts.querySelector<HTMLButtonElement>(".label-btn.label-present")!;
    expect(button.disabled).toBe(false);
    button.click();
    await flush();

    const posts = backend.calls.filter((c) => c.method === "POST");
    expect(posts).toHaveLength(1);
    expect(posts[0]!.url).toBe("/api/posts/p1/label");
    expect(posts[0]!.body).toEqual({ label: "present" });
    // widget shows the refreshed snapshot from the label response
    expect(r.metrics.textContent).toContain("50.0%");
    expect(r.posts.textContent).toContain("labeled");
  });

  it("duplicate label surfaces an inline error without corrupting state", async () => {
    const backend = stubBackend({
      posts: [makePost({ id: "p1" })],
      labelStatus: 409,
    });
    const { r, controller } = boot(backend);
    await flush();

    await controller.label("p1", "absent");
    await flush();

    expect(r.posts.querySelector(".inline-error")!.textContent).toBe("duplicate label");
    expect(controller.state().posts[0]!.moderator_label).toBeNull();
    expect(backend.calls.filter((c) => c.method === "POST")).toHaveLength(1);
  });

  it("selecting a post fetches its explanation once and caches it", async () => {
    const longText = "y".repeat(480);
    const backend = stubBackend({
      posts: [makePost({ id: "p1" })],
      explanationText: longText,
    });
    const { r, controller } = boot(backend);
    await flush();

    controller.select("p1");
    await flush();
    controller.select("p1");
    await flush();

    const explanationCalls = backend.calls.filter((c) => c.url.endsWith("/explanation"));
    expect(explanationCalls).toHaveLength(1); // cached after the first fetch
    const body = r.explanation.querySelector(".explanation-text")!;
    expect(body.textContent).toBe(longText);
    expect(body.textContent!.length).toBeLessThanOrEqual(500);
  });

  it("pushed posts appear newest-first with the right badge color", async () => {
    const backend = stubBackend({ posts: [makePost({ id: "old" })] });
    const { r } = boot(backend);
    await flush();

    backend.pushPost(makePost({ id: "fresh", predicted: "present", confidence_pct: 94.6 }));
    await flush();

    const rows = r.posts.querySelectorAll("tr[data-post-id]");
    expect(rows[0]!.getAttribute("data-post-id")).toBe("fresh");
    expect(rows[0]!.querySelector(".badge")!.className).toContain("badge-present");
    expect(rows[0]!.querySelector(".confidence")!.textContent).toBe("94.6%");
  });

  it("connection status drives the banner and disables controls when offline", async () => {
    const backend = stubBackend({ posts: [makePost({ id: "p1" })] });
    const { r } = boot(backend);
    await flush();

    backend.pushStatus("live");
    expect(r.connection.className).toContain("connection-live");

    backend.pushStatus("offline");
    expect(r.connection.className).toContain("connection-offline");
    expect(r.connection.textContent).toContain("cached view");
    const button = r.posts.querySelector<HTMLButtonElement>(".label-btn")!;
    expect(button.disabled).toBe(true);
  });
});
