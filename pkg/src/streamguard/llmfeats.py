"""Boolean trait features extracted from raw post text via a chat-completion
endpoint, with a content-hash cache and a deterministic offline mock.

The trait prompt always receives the original, unpreprocessed text. Failures
never stop a stream: after the retry budget the extractor returns all-false
traits flagged as degraded, and only successful responses are cached.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

TRAITS = (
    "derogatory",
    "humiliating",
    "racist",
    "sarcasm",
    "sexual",
    "threatening",
    "violence",
)

FEATURE_PROMPT_TEMPLATE = (
    "This text has been taken from social media. Please\n"
    "analyze if it contains derogatory, humiliating,\n"
    "racist, sarcastic, sexual, threatening, or violent\n"
    "remarks, terms, and language, and return 1 if there\n"
    "exist and 0 otherwise. Following this JSON format.\n"
    "Do not add any explanation:\n"
    '{"derogatory":0,\n'
    '"humiliating":0,\n'
    '"racist":0,\n'
    '"sarcasm":0,\n'
    '"sexual":0,\n'
    '"threatening":0,\n'
    '"violence":0\n'
    "}\n"
)

ENV_ENDPOINT = "STREAMGUARD_LLM_URL"
ENV_TOKEN = "STREAMGUARD_LLM_TOKEN"

_FENCE_RE = re.compile(r"^```[a-zA-Z]*\s*|\s*```$")


class MalformedResponse(ValueError):
    """The backend reply is not the expected seven-key 0/1 JSON object."""


@dataclass(frozen=True)
class LlmTraits:
    derogatory: bool = False
    humiliating: bool = False
    racist: bool = False
    sarcasm: bool = False
    sexual: bool = False
    threatening: bool = False
    violence: bool = False

    @classmethod
    def from_mapping(cls, mapping) -> "LlmTraits":
        return cls(**{k: bool(mapping[k]) for k in TRAITS})

    def as_features(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in TRAITS}

    def active(self) -> tuple[str, ...]:
        return tuple(name for name in TRAITS if getattr(self, name))


ALL_FALSE = LlmTraits()


@dataclass(frozen=True)
class ExtractionResult:
    traits: LlmTraits
    degraded: bool = False
    from_cache: bool = False


def build_feature_prompt(raw_text: str) -> str:
    """Trait prompt: the fixed template with the raw post appended."""
    return FEATURE_PROMPT_TEMPLATE + raw_text


def parse_trait_response(body: str) -> LlmTraits:
    """Parse the seven-key 0/1 JSON reply; tolerant of code fences only."""
    text = body.strip()
    text = _FENCE_RE.sub("", text).strip()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedResponse(f"unparseable trait response: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != set(TRAITS):
        raise MalformedResponse(f"trait keys mismatch: {sorted(obj) if isinstance(obj, dict) else type(obj)}")
    values = {}
    for key in TRAITS:
        v = obj[key]
        if isinstance(v, bool) or v not in (0, 1):
            raise MalformedResponse(f"trait {key!r} must be 0 or 1, got {v!r}")
        values[key] = bool(v)
    return LlmTraits(**values)


def content_hash(raw_text: str) -> str:
    return hashlib.sha256(raw_text.encode("utf-8")).hexdigest()


def _load_trait_phrases() -> dict[str, tuple[str, ...]]:
    table: dict[str, list[str]] = {t: [] for t in TRAITS}
    text = resources.files("streamguard.data").joinpath("trait_phrases.tsv").read_text("utf-8")
    for line in text.splitlines():
        if not line.strip():
            continue
        trait, phrase = line.split("\t")
        table[trait].append(phrase.lower())
    return {t: tuple(v) for t, v in table.items()}


TRAIT_PHRASES = _load_trait_phrases()


class MockLlmBackend:
    """Offline stand-in: trait flags fire on case-insensitive phrase hits.

    For non-trait prompts (explanations) it answers with a short
    deterministic sentence so the whole stack works without a network.
    """

    name = "mock"

    def complete(self, prompt: str) -> str:
        if prompt.startswith(FEATURE_PROMPT_TEMPLATE):
            post = prompt[len(FEATURE_PROMPT_TEMPLATE):].lower()
            flags = {
                trait: int(any(phrase in post for phrase in phrases))
                for trait, phrases in TRAIT_PHRASES.items()
            }
            return json.dumps(flags)
        digest = content_hash(prompt)[:8]
        return (
            "This post was reviewed automatically against the flagged trait "
            f"signals and the classifier confidence (ref {digest})."
        )


class RemoteLlmBackend:
    """Chat-completion HTTP client. Temperature is pinned to 0 by design and
    cannot be overridden; endpoint and token come from the environment unless
    passed explicitly."""

    name = "remote"
    temperature = 0

    def __init__(self, endpoint: str | None = None, model: str = "gpt-4o-mini",
                 timeout_s: float = 30.0, token: str | None = None):
        self.endpoint = endpoint or os.environ.get(ENV_ENDPOINT, "")
        self.model = model
        self.timeout_s = timeout_s
        self.token = token if token is not None else os.environ.get(ENV_TOKEN, "")
        if not self.endpoint:
            raise ValueError(f"remote backend needs an endpoint ({ENV_ENDPOINT})")

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {"Content-Type": "application/json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        req = urllib.request.Request(
            self.endpoint, data=json.dumps(payload).encode("utf-8"),
            headers=headers, method="POST",
        )
        with urllib.request.urlopen(req, timeout=self.timeout_s) as resp:
            body = json.loads(resp.read().decode("utf-8"))
        return body["choices"][0]["message"]["content"]


class TraitCache:
    """Append-only JSON-lines cache keyed by the content hash of raw text."""

    def __init__(self, path: str | None):
        self.path = path
        self._lock = threading.Lock()
        self._mem: dict[str, LlmTraits] = {}
        if path and os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        self._mem[rec["hash"]] = LlmTraits.from_mapping(rec["traits"])
                    except (json.JSONDecodeError, KeyError, TypeError):
                        continue  # tolerate torn writes

    def get(self, key: str) -> LlmTraits | None:
        with self._lock:
            return self._mem.get(key)

    def put(self, key: str, traits: LlmTraits) -> None:
        with self._lock:
            if key in self._mem:
                return
            self._mem[key] = traits
            if self.path:
                rec = {"hash": key, "traits": {t: int(getattr(traits, t)) for t in TRAITS}}
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(rec) + "\n")

    def __len__(self) -> int:
        return len(self._mem)


class TraitExtractor:
    """extract() = cache lookup, then prompt/parse with retries, then the
    degraded all-false fallback. Never raises on backend trouble."""

    def __init__(self, backend, cache: TraitCache | None = None, max_retries: int = 3):
        self.backend = backend
        self.cache = cache if cache is not None else TraitCache(path=None)
        self.max_retries = max_retries
        self.calls = 0  # remote/mock completions actually issued

    def extract(self, raw_text: str) -> ExtractionResult:
        key = content_hash(raw_text)
        hit = self.cache.get(key)
        if hit is not None:
            return ExtractionResult(traits=hit, from_cache=True)
        prompt = build_feature_prompt(raw_text)
        for _ in range(self.max_retries):
            try:
                self.calls += 1
                traits = parse_trait_response(self.backend.complete(prompt))
            except (MalformedResponse, OSError, ValueError, KeyError):
                continue
            self.cache.put(key, traits)
            return ExtractionResult(traits=traits)
        return ExtractionResult(traits=ALL_FALSE, degraded=True)

    def extract_many(self, texts, max_workers: int = 4) -> list[ExtractionResult]:
        """Order-preserving batch extraction with bounded parallelism."""
        if max_workers <= 1:
            return [self.extract(t) for t in texts]
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(self.extract, texts))
