"""Append-only JSON-lines event log for the moderation service.

Event kinds: ingested, predicted, labeled, explained, mask_changed.
Sequence numbers are strictly increasing; replaying ingested/labeled events
into a fresh service reconstructs its state.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass

EVENT_KINDS = ("ingested", "predicted", "labeled", "explained", "mask_changed")


@dataclass(frozen=True)
class ModerationEvent:
    kind: str
    payload: dict
    seq: int
    at: float

    def as_dict(self) -> dict:
        return {"seq": self.seq, "at": self.at, "kind": self.kind,
                "payload": self.payload}


class EventLog:
    """Single-writer appender; ``path=None`` keeps the log in memory only."""

    def __init__(self, path: str | None = None):
        self.path = path
        self._lock = threading.Lock()
        self._seq = 0
        self.events: list[ModerationEvent] = []

    def append(self, kind: str, payload: dict) -> ModerationEvent:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock:
            self._seq += 1
            event = ModerationEvent(kind=kind, payload=payload, seq=self._seq,
                                    at=time.time())
            self.events.append(event)
            if self.path:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(event.as_dict()) + "\n")
            return event


def read_events(path: str) -> list[ModerationEvent]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(
                ModerationEvent(kind=rec["kind"], payload=rec["payload"],
                                seq=rec["seq"], at=rec["at"])
            )
    return out
