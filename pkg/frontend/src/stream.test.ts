import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "./api.js";
import { connectStream } from "./stream.js";
import { makePost } from "./state.test.js";
import type { ConnectionStatus, PostView } from "./types.js";

class FakeEventSource {
  onerror: ((ev: unknown) => void) | null = null;
  onopen: ((ev: unknown) => void) | null = null;
  closed = false;
  listeners: Record<string, (ev: MessageEvent) => void> = {};

  addEventListener(type: string, cb: (ev: MessageEvent) => void): void {
    this.listeners[type] = cb;
  }

  close(): void {
    this.closed = true;
  }

  emit(post: PostView): void {
    this.listeners["post"]?.({ data: JSON.stringify(post) } as MessageEvent);
  }
}

function collector() {
  const posts: PostView[] = [];
  const statuses: ConnectionStatus[] = [];
  return {
    posts,
    statuses,
    callbacks: {
      onPost: (p: PostView) => posts.push(p),
      onStatus: (s: ConnectionStatus) => statuses.push(s),
    },
  };
}

describe("stream", () => {
  it("delivers pushed posts and reports live status", () => {
    const source = new FakeEventSource();
    const { posts, statuses, callbacks } = collector();
    const api = new ApiClient("", vi.fn() as unknown as typeof fetch);
    const handle = connectStream("", api, callbacks, { factory: () => source });

    source.onopen?.({});
    source.emit(makePost({ id: "sse-1" }));
    expect(statuses).toEqual(["live"]);
    expect(posts.map((p) => p.id)).toEqual(["sse-1"]);

    handle.stop();
    expect(source.closed).toBe(true);
  });

  it("falls back to polling when the stream errors", async () => {
    const source = new FakeEventSource();
    const { posts, statuses, callbacks } = collector();
    const fetchStub = vi.fn(async () =>
      new Response(
        JSON.stringify({
          page: 1,
          page_size: 50,
          total: 1,
          posts: [makePost({ id: "polled-1" })],
        }),
        { status: 200 },
      ),
    );
    const api = new ApiClient("", fetchStub as unknown as typeof fetch);

    let tick: (() => Promise<void>) | null = null;
    const handle = connectStream("", api, callbacks, {
      factory: () => source,
      pollIntervalMs: 1,
      setIntervalImpl: ((fn: () => Promise<void>) => {
        tick = fn;
        return 1 as unknown as ReturnType<typeof setInterval>;
      }) as typeof setInterval,
      clearIntervalImpl: (() => {}) as typeof clearInterval,
    });

    source.onerror?.({});
    expect(statuses).toEqual(["polling"]);
    await tick!();
    expect(posts.map((p) => p.id)).toEqual(["polled-1"]);

    // reconnect flips back to live
    source.onopen?.({});
    expect(statuses.at(-1)).toBe("live");
    handle.stop();
  });
});
