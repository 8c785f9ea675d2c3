/** Dashboard bootstrap against the real service origin. */

import { ApiClient } from "./api.js";
import { createDashboard } from "./controller.js";
import { connectStream } from "./stream.js";

const API_BASE = (window as { STREAMGUARD_API?: string }).STREAMGUARD_API ?? "";

export function startDashboard(): void {
  const roots = {
    posts: document.getElementById("posts")!,
    explanation: document.getElementById("explanation")!,
    metrics: document.getElementById("metrics")!,
    connection: document.getElementById("connection")!,
  };
  const api = new ApiClient(API_BASE);
  createDashboard(roots, api, (onPost, onStatus) =>
    connectStream(API_BASE, api, { onPost, onStatus }),
  );
}

if (typeof document !== "undefined" && document.getElementById("posts") !== null) {
  startDashboard();
}
