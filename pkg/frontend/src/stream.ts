/**
 * Live updates: server-sent events with a polling fallback.
 *
 * The SSE channel pushes full post views. When it errors the subscriber
 * flips to polling the posts endpoint until the stream reconnects.
 */

import type { ApiClient } from "./api.js";
import type { ConnectionStatus, PostView } from "./types.js";

export interface StreamHandle {
  stop(): void;
}

export interface StreamCallbacks {
  onPost(post: PostView): void;
  onStatus(status: ConnectionStatus): void;
}

interface EventSourceLike {
  addEventListener(type: string, cb: (ev: MessageEvent) => void): void;
  onerror: ((ev: Event) => void) | null;
  onopen: ((ev: Event) => void) | null;
  close(): void;
}

type EventSourceFactory = (url: string) => EventSourceLike;

const defaultFactory: EventSourceFactory = (url) => new EventSource(url);

export function connectStream(
  base: string,
  api: ApiClient,
  callbacks: StreamCallbacks,
  options: {
    factory?: EventSourceFactory;
    pollIntervalMs?: number;
    setIntervalImpl?: typeof setInterval;
    clearIntervalImpl?: typeof clearInterval;
  } = {},
): StreamHandle {
  const factory = options.factory ?? defaultFactory;
  const pollInterval = options.pollIntervalMs ?? 5000;
  const setI = options.setIntervalImpl ?? setInterval;
  const clearI = options.clearIntervalImpl ?? clearInterval;

  let poller: ReturnType<typeof setInterval> | null = null;
  let stopped = false;

  const stopPolling = () => {
    if (poller !== null) {
      clearI(poller);
      poller = null;
    }
  };

  const startPolling = () => {
    if (poller !== null || stopped) return;
    callbacks.onStatus("polling");
    poller = setI(async () => {
      try {
        const page = await api.getPosts(1, 50);
        for (const post of page.posts.slice().reverse()) {
          callbacks.onPost(post); // oldest of the page first
        }
      } catch {
        callbacks.onStatus("offline");
      }
    }, pollInterval);
  };

  let source: EventSourceLike;
  try {
    source = factory(`${base}/api/stream`);
  } catch {
    startPolling();
    return {
      stop() {
        stopped = true;
        stopPolling();
      },
    };
  }

  source.onopen = () => {
    stopPolling();
    callbacks.onStatus("live");
  };
  source.addEventListener("post", (event) => {
    callbacks.onPost(JSON.parse(event.data) as PostView);
  });
  source.onerror = () => {
    startPolling();
  };

  return {
    stop() {
      stopped = true;
      stopPolling();
      source.close();
    },
  };
}
