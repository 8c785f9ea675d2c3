/**
 * Wires API, stream, reducer, and renderers together. Everything impure is
 * injectable so contract tests can run against a stubbed API.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  renderConnectionBanner,
  renderExplanationPanel,
  renderMetricsWidget,
  renderPostTable,
} from "./render.js";
import type { Action, DashboardState } from "./state.js";
import { initialState, reduce } from "./state.js";
import type { StreamHandle } from "./stream.js";
import type { Label } from "./types.js";

export interface DashboardRoots {
  posts: HTMLElement;
  explanation: HTMLElement;
  metrics: HTMLElement;
  connection: HTMLElement;
}

export interface DashboardController {
  state(): DashboardState;
  select(id: string): void;
  label(id: string, label: Label): Promise<void>;
  stop(): void;
}

type StreamConnector = (
  onPost: (post: import("./types.js").PostView) => void,
  onStatus: (status: import("./types.js").ConnectionStatus) => void,
) => StreamHandle;

export function createDashboard(
  roots: DashboardRoots,
  api: ApiClient,
  connect: StreamConnector,
): DashboardController {
  let state: DashboardState = initialState;

  const handlers = {
    onSelect: (id: string) => controller.select(id),
    onLabel: (id: string, label: Label) => void controller.label(id, label),
  };

  const render = () => {
    renderPostTable(roots.posts, state, handlers);
    renderExplanationPanel(roots.explanation, state);
    renderMetricsWidget(roots.metrics, state);
    renderConnectionBanner(roots.connection, state);
  };

  const dispatch = (action: Action) => {
    state = reduce(state, action);
    render();
  };

  const stream = connect(
    (post) => dispatch({ kind: "post_pushed", post }),
    (status) => dispatch({ kind: "connection_changed", status }),
  );

  const controller: DashboardController = {
    state: () => state,

    select(id: string) {
      dispatch({ kind: "post_selected", id });
      if (state.explanations[id] === undefined) {
        void api
          .getExplanation(id)
          .then((explanation) => dispatch({ kind: "explanation_loaded", explanation }))
          .catch(() => {
            /* reselecting retries */
          });
      }
    },

    async label(id: string, label: Label) {
      if (state.pending[id]) return;
      dispatch({ kind: "label_pending", id });
      try {
        const metrics = await api.submitLabel(id, label);
        dispatch({ kind: "label_accepted", id, label, metrics });
      } catch (error) {
        const message =
          error instanceof ApiError ? error.message : "label submission failed";
        dispatch({ kind: "label_rejected", id, message });
      }
    },

    stop() {
      stream.stop();
    },
  };

  void api
    .getPosts(1, 50)
    .then((page) => dispatch({ kind: "posts_loaded", posts: page.posts }))
    .catch(() => dispatch({ kind: "connection_changed", status: "offline" }));
  void api
    .getMetrics()
    .then((metrics) => dispatch({ kind: "metrics_loaded", metrics }))
    .catch(() => {
      /* widget shows a dash until the first snapshot */
    });

  render();
  return controller;
}
