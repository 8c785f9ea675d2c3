"""Moderation service: ingest posts, predict, explain, and learn from
moderator labels; every state change lands in an append-only event log.

Ingestion never trains the model. Learning happens exclusively through
submitted labels, which also feed the running metrics and the variance
filter. Replaying a log's ingested/labeled events into a fresh service
with the same bundle reconstructs metrics, masks, and predictions.

The HTTP layer is a thin stdlib server over the engine: JSON endpoints
plus a server-sent-events stream pushing new posts to the dashboard.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import numpy as np

from streamguard.events import EventLog
from streamguard.explain import ExplanationRequest, generate_explanation
from streamguard.learners import CLASSES
from streamguard.llmfeats import MockLlmBackend, RemoteLlmBackend, TraitCache, TraitExtractor
from streamguard.metrics import StreamMetrics
from streamguard.pipeline import (
    LABEL_TO_INT,
    ColdStartResult,
    FeatureExtractor,
    PipelineConfig,
    StreamingPipeline,
)
from streamguard.preprocess import RawPost


class UnknownPost(KeyError):
    pass


class DuplicateLabel(ValueError):
    pass


class ServiceNotReady(RuntimeError):
    pass


@dataclass
class PostRecord:
    id: str
    text: str
    features: dict
    vector: np.ndarray
    traits: object
    degraded_traits: bool
    predicted: str
    proba: dict
    mask_version: int
    moderator_label: str | None = None
    explanation: object = None

    def view(self) -> dict:
        out = {
            "id": self.id,
            "text": self.text,
            "predicted": self.predicted,
            "proba": self.proba,
            "confidence_pct": 100.0 * max(self.proba.values()),
            "mask_version": self.mask_version,
            "degraded": self.degraded_traits,
            "moderator_label": self.moderator_label,
            "explanation": None,
        }
        if self.explanation is not None:
            out["explanation"] = {
                "text": self.explanation.text,
                "degraded": self.explanation.degraded,
            }
        return out


def bundle_from_pipeline(config: PipelineConfig, pipeline: StreamingPipeline) -> dict:
    return {
        "model": pipeline.model,
        "model_kind": config.model,
        "model_id": pipeline.model_id,
        "space": pipeline.space,
        "tracker": pipeline.tracker,
        "vocab": pipeline.extractor.vocab,
        "scenario": config.scenario,
        "seed": config.seed,
    }


def bundle_from_cold(config: PipelineConfig, cold: ColdStartResult) -> dict:
    return {
        "model": cold.model,
        "model_kind": config.model,
        "model_id": f"{config.model}-s{config.seed}",
        "space": cold.space,
        "tracker": cold.tracker,
        "vocab": cold.vocab,
        "scenario": config.scenario,
        "seed": config.seed,
    }


class ModerationService:
    """Single-writer moderation engine over a trained model bundle."""

    def __init__(self, bundle: dict, llm: str = "mock",
                 event_log: EventLog | None = None,
                 llm_cache: str | None = None):
        self.model = bundle["model"]
        self.model_id = bundle.get("model_id", bundle.get("model_kind", "model"))
        self.space = bundle["space"]
        self.tracker = bundle["tracker"]
        self.backend = MockLlmBackend() if llm == "mock" else RemoteLlmBackend()
        self.extractor = FeatureExtractor(
            TraitExtractor(self.backend, TraitCache(llm_cache)),
            vocab=bundle.get("vocab"),
        )
        self.log = event_log if event_log is not None else EventLog()
        self.metrics = StreamMetrics()
        self._lock = threading.RLock()
        self._posts: dict[str, PostRecord] = {}
        self._order: list[str] = []
        self._counter = 0
        self._subscribers: list[queue.Queue] = []

    # -- streaming fan-out ---------------------------------------------------

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _broadcast(self, view: dict) -> None:
        for q in list(self._subscribers):
            q.put(view)

    # -- operations ------------------------------------------------------

    def ingest(self, text: str) -> dict:
        with self._lock:
            self._counter += 1
            post_id = f"post-{self._counter:06d}"
            post = RawPost(id=post_id, text=text)
            feats, ext = self.extractor.extract(post)
            mask = self.tracker.mask
            x = self.space.vectorize(feats, mask.active)
            proba_arr = self.model.predict_proba(x)
            predicted = CLASSES[int(np.argmax(proba_arr))]
            record = PostRecord(
                id=post_id,
                text=text,
                features=feats,
                vector=x,
                traits=ext.traits,
                degraded_traits=ext.degraded,
                predicted=predicted,
                proba={c: float(p) for c, p in zip(CLASSES, proba_arr)},
                mask_version=mask.version,
            )
            self._posts[post_id] = record
            self._order.append(post_id)
            self.log.append("ingested", {"id": post_id, "text": text})
            self.log.append(
                "predicted",
                {
                    "id": post_id,
                    "predicted": predicted,
                    "proba": record.proba,
                    "mask_version": mask.version,
                    "degraded": ext.degraded,
                },
            )
            view = record.view()
        self._broadcast(view)
        return view

    def submit_label(self, post_id: str, label: str) -> dict:
        if label not in CLASSES:
            raise ValueError(f"label must be one of {CLASSES}")
        with self._lock:
            record = self._posts.get(post_id)
            if record is None:
                raise UnknownPost(post_id)
            if record.moderator_label is not None:
                raise DuplicateLabel(f"{post_id} already labeled "
                                     f"{record.moderator_label!r}")
            record.moderator_label = label
            self.metrics.update(record.predicted, label)
            self.model.learn_one(record.vector, LABEL_TO_INT[label])
            before = self.tracker.mask.version
            tracked = {n: record.features.get(n, 0.0)
                       for n in self.tracker.feature_names}
            mask = self.tracker.update(tracked)
            self.log.append("labeled", {"id": post_id, "label": label})
            if mask.version != before:
                self.log.append(
                    "mask_changed",
                    {"version": mask.version, "active": mask.sorted_names()},
                )
            return self.get_metrics()

    def get_metrics(self) -> dict:
        with self._lock:
            snap = self.metrics.snapshot().as_dict()
            snap["mask_version"] = self.tracker.mask.version
            snap["posts_total"] = len(self._order)
            snap["posts_labeled"] = sum(
                1 for pid in self._order
                if self._posts[pid].moderator_label is not None
            )
            return snap

    def get_posts(self, page: int = 1, page_size: int = 20) -> dict:
        if page < 1 or page_size < 1:
            raise ValueError("page and page_size must be >= 1")
        with self._lock:
            newest_first = list(reversed(self._order))
            start = (page - 1) * page_size
            chunk = newest_first[start: start + page_size]
            return {
                "page": page,
                "page_size": page_size,
                "total": len(newest_first),
                "posts": [self._posts[pid].view() for pid in chunk],
            }

    def get_post(self, post_id: str) -> dict:
        with self._lock:
            record = self._posts.get(post_id)
            if record is None:
                raise UnknownPost(post_id)
            return record.view()

    def get_explanation(self, post_id: str) -> dict:
        with self._lock:
            record = self._posts.get(post_id)
            if record is None:
                raise UnknownPost(post_id)
            if record.explanation is None:
                req = ExplanationRequest(
                    predicted=record.predicted,
                    confidence_pct=100.0 * max(record.proba.values()),
                    traits=record.traits,
                    raw_text=record.text,
                )
                record.explanation = generate_explanation(req, self.backend)
                self.log.append(
                    "explained",
                    {
                        "id": post_id,
                        "text": record.explanation.text,
                        "degraded": record.explanation.degraded,
                    },
                )
            return {
                "id": post_id,
                "text": record.explanation.text,
                "degraded": record.explanation.degraded,
            }

    def replay(self, events) -> None:
        """Re-apply ingested/labeled events in sequence order."""
        for event in sorted(events, key=lambda e: e.seq):
            if event.kind == "ingested":
                view = self.ingest(event.payload["text"])
                if view["id"] != event.payload["id"]:
                    raise ValueError(
                        f"replay id drift: {view['id']} != {event.payload['id']}"
                    )
            elif event.kind == "labeled":
                self.submit_label(event.payload["id"], event.payload["label"])


# ---------------------------------------------------------------------------
# HTTP facade
# ---------------------------------------------------------------------------


class ModerationHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, service: ModerationService | None,
                 token: str | None = None):
        super().__init__(address, ModerationHandler)
        self.service = service
        self.token = token


class ModerationHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    # -- plumbing ----------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _authorized(self) -> bool:
        token = self.server.token
        if not token:
            return True
        header = self.headers.get("Authorization", "")
        if header == f"Bearer {token}":
            return True
        return self.headers.get("X-Auth-Token", "") == token

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        try:
            return json.loads(self.rfile.read(length).decode("utf-8"))
        except json.JSONDecodeError:
            raise ValueError("request body must be JSON")

    def _service(self) -> ModerationService:
        if self.server.service is None:
            raise ServiceNotReady("model not initialized")
        return self.server.service

    def _dispatch(self, method: str) -> None:
        if not self._authorized():
            self._send_json(401, {"error": "unauthorized"})
            return
        try:
            path = urlparse(self.path)
            parts = [p for p in path.path.split("/") if p]
            if method == "GET" and parts == ["api", "stream"]:
                self._handle_stream()
                return
            handler = self._route(method, parts, parse_qs(path.query))
            self._send_json(*handler)
        except ServiceNotReady as exc:
            self._send_json(503, {"error": str(exc)})
        except UnknownPost as exc:
            self._send_json(404, {"error": f"unknown post {exc.args[0]!r}"})
        except DuplicateLabel as exc:
            self._send_json(409, {"error": str(exc)})
        except ValueError as exc:
            self._send_json(400, {"error": str(exc)})

    def _route(self, method: str, parts: list, query: dict):
        svc = self._service()
        if method == "POST" and parts == ["api", "posts"]:
            body = self._read_body()
            if "text" not in body:
                raise ValueError("body must contain 'text'")
            return 201, svc.ingest(str(body["text"]))
        if method == "GET" and parts == ["api", "posts"]:
            page = int(query.get("page", ["1"])[0])
            page_size = int(query.get("page_size", ["20"])[0])
            return 200, svc.get_posts(page, page_size)
        if method == "GET" and len(parts) == 3 and parts[:2] == ["api", "posts"]:
            return 200, svc.get_post(parts[2])
        if method == "POST" and len(parts) == 4 and parts[:2] == ["api", "posts"] \
                and parts[3] == "label":
            body = self._read_body()
            if "label" not in body:
                raise ValueError("body must contain 'label'")
            return 200, svc.submit_label(parts[2], str(body["label"]))
        if method == "GET" and len(parts) == 4 and parts[:2] == ["api", "posts"] \
                and parts[3] == "explanation":
            return 200, svc.get_explanation(parts[2])
        if method == "GET" and parts == ["api", "metrics"]:
            return 200, svc.get_metrics()
        raise ValueError(f"no route for {method} {self.path}")

    def _handle_stream(self) -> None:
        svc = self._service()
        q = svc.subscribe()
        try:
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(b"retry: 2000\n\n")
            self.wfile.flush()
            while True:
                try:
                    view = q.get(timeout=15.0)
                except queue.Empty:
                    self.wfile.write(b": keep-alive\n\n")
                    self.wfile.flush()
                    continue
                data = json.dumps(view)
                self.wfile.write(f"event: post\ndata: {data}\n\n".encode("utf-8"))
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError, ServiceNotReady):
            pass
        finally:
            svc.unsubscribe(q)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")


def serve(service: ModerationService | None, host: str = "127.0.0.1",
          port: int = 8787, token: str | None = None) -> ModerationHTTPServer:
    """Start the HTTP facade in a daemon thread; returns the server handle."""
    server = ModerationHTTPServer((host, port), service, token=token)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
