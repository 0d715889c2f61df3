"""Text-generation provider clients.

A conversation is a list of ``{"role": ..., "content": ...}`` messages.  All
clients expose ``complete(conversation) -> str`` and ``embed(text) -> vector``.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np

log = logging.getLogger(__name__)

Message = Mapping[str, str]
Conversation = Sequence[Message]

EMBED_DIM = 256


class ProviderError(RuntimeError):
    pass


class EmptyCompletion(ProviderError):
    pass


class ProviderClient(Protocol):
    def complete(self, conversation: Conversation) -> str: ...

    def embed(self, text: str) -> np.ndarray: ...


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def conversation_hash(conversation: Conversation) -> str:
    msgs = [{"role": m["role"], "content": m["content"]} for m in conversation]
    return hashlib.sha256(canonical_json(msgs).encode("utf-8")).hexdigest()


def hashed_embedding(text: str, dim: int = EMBED_DIM) -> np.ndarray:
    """Unit-norm signed bag-of-words hashing embedding; deterministic and offline."""
    vec = np.zeros(dim)
    for word in re.findall(r"[a-z0-9']+", text.lower()):
        h = hashlib.sha256(word.encode("utf-8")).digest()
        idx = int.from_bytes(h[:4], "little") % dim
        vec[idx] += 1.0 if h[4] & 1 else -1.0
    norm = np.linalg.norm(vec)
    if norm == 0:
        vec[0] = 1.0
        return vec
    return vec / norm


def _last_user(conversation: Conversation) -> str:
    for m in reversed(conversation):
        if m["role"] == "user":
            return m["content"]
    return ""


class MockProvider:
    """Scripted provider: first rule whose key occurs in the last user message wins."""

    def __init__(self, rules: Sequence[tuple[str, str]] | Mapping[str, str] = (),
                 default: str | Callable[[Conversation], str] = "",
                 dim: int = EMBED_DIM):
        self.rules = list(rules.items() if isinstance(rules, Mapping) else rules)
        self.default = default
        self.dim = dim
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, conversation: Conversation) -> str:
        with self._lock:
            self.calls += 1
        query = _last_user(conversation)
        for key, out in self.rules:
            if key in query:
                return out
        return self.default(conversation) if callable(self.default) else self.default

    def embed(self, text: str) -> np.ndarray:
        return hashed_embedding(text, self.dim)


@dataclass
class FixtureRecord:
    hash: str
    completion: str
    note: str = ""


def read_fixture(path: str | Path) -> list[FixtureRecord]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [FixtureRecord(r["hash"], r["completion"], r.get("note", "")) for r in data["records"]]


def write_fixture(path: str | Path, records: Sequence[FixtureRecord]) -> None:
    out = {"records": [{"hash": r.hash, "completion": r.completion, "note": r.note} for r in records]}
    Path(path).write_text(json.dumps(out, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


class FixtureReplayer:
    """Replays recorded completions keyed by conversation hash; never touches the network."""

    def __init__(self, records: Sequence[FixtureRecord] | str | Path, dim: int = EMBED_DIM):
        if isinstance(records, (str, Path)):
            records = read_fixture(records)
        self.table = {r.hash: r.completion for r in records}
        self.dim = dim
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, conversation: Conversation) -> str:
        key = conversation_hash(conversation)
        with self._lock:
            self.calls += 1
        if key not in self.table:
            raise ProviderError(f"no recorded completion for conversation {key[:12]}")
        return self.table[key]

    def embed(self, text: str) -> np.ndarray:
        return hashed_embedding(text, self.dim)


class RecordingProvider:
    """Wraps a client and keeps an ordered record of every completion."""

    def __init__(self, inner: ProviderClient):
        self.inner = inner
        self.records: list[FixtureRecord] = []
        self._lock = threading.Lock()

    def complete(self, conversation: Conversation) -> str:
        out = self.inner.complete(conversation)
        rec = FixtureRecord(conversation_hash(conversation), out, _last_user(conversation)[-80:])
        with self._lock:
            if all(r.hash != rec.hash for r in self.records):
                self.records.append(rec)
        return out

    def embed(self, text: str) -> np.ndarray:
        return self.inner.embed(text)

    def save(self, path: str | Path) -> None:
        write_fixture(path, self.records)


class CachingProvider:
    """Content-addressed on-disk cache in front of another client."""

    def __init__(self, inner: ProviderClient, cache_dir: str | Path):
        self.inner = inner
        self.dir = Path(cache_dir) / "provider"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.misses = 0
        self._lock = threading.Lock()

    def complete(self, conversation: Conversation) -> str:
        path = self.dir / f"{conversation_hash(conversation)}.txt"
        if path.exists():
            return path.read_text(encoding="utf-8")
        out = self.inner.complete(conversation)
        with self._lock:
            self.misses += 1
            tmp = path.with_suffix(f".tmp{threading.get_ident()}")
            tmp.write_text(out, encoding="utf-8")
            tmp.replace(path)
        return out

    def embed(self, text: str) -> np.ndarray:
        key = hashlib.sha256(text.encode("utf-8")).hexdigest()
        path = self.dir / f"{key}.emb.npy"
        if path.exists():
            return np.load(path)
        vec = np.asarray(self.inner.embed(text), dtype=np.float64)
        with self._lock:
            self.misses += 1
            np.save(path, vec)
        return vec


class RateLimiter:
    """Token bucket: at most ``rate`` acquisitions per second on average, bursts up to ``burst``."""

    def __init__(self, rate: float, burst: int = 1, clock=time.monotonic, sleep=time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.burst = max(1, burst)
        self.tokens = float(self.burst)
        self.clock = clock
        self.sleep = sleep
        self.last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self.clock()
                self.tokens = min(self.burst, self.tokens + (now - self.last) * self.rate)
                self.last = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                self.sleep((1 - self.tokens) / self.rate)


@dataclass
class HttpSettings:
    api_base: str = "https://api.openai.com/v1"
    model: str = "gpt-4o-2024-05-13"
    embed_model: str = "text-embedding-3-small"
    temperature: float = 0.0
    timeout: float = 60.0
    retries: int = 3
    backoff: float = 1.0
    rate: float = 2.0
    api_key: str = field(default="", repr=False)

    @classmethod
    def from_env(cls, **overrides) -> "HttpSettings":
        env = {
            "api_base": os.environ.get("ASLGEN_API_BASE"),
            "model": os.environ.get("ASLGEN_MODEL"),
            "embed_model": os.environ.get("ASLGEN_EMBED_MODEL"),
            "api_key": os.environ.get("ASLGEN_API_KEY") or os.environ.get("OPENAI_API_KEY"),
        }
        vals = {k: v for k, v in env.items() if v}
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**vals)


class HttpProvider:
    """OpenAI-compatible chat-completions and embeddings client."""

    def __init__(self, settings: HttpSettings, opener=urllib.request.urlopen, sleep=time.sleep):
        if not settings.api_key:
            raise ProviderError("no API key configured (set ASLGEN_API_KEY)")
        self.s = settings
        self.opener = opener
        self.sleep = sleep
        self.limiter = RateLimiter(settings.rate, burst=1, sleep=sleep)

    def _post(self, path: str, payload: dict) -> dict:
        req = urllib.request.Request(
            self.s.api_base.rstrip("/") + path,
            data=json.dumps(payload).encode("utf-8"),
            headers={"Content-Type": "application/json",
                     "Authorization": f"Bearer {self.s.api_key}"},
        )
        last: Exception | None = None
        for attempt in range(self.s.retries):
            self.limiter.acquire()
            try:
                with self.opener(req, timeout=self.s.timeout) as resp:
                    return json.loads(resp.read().decode("utf-8"))
            except urllib.error.HTTPError as exc:
                last = exc
                if exc.code < 500 and exc.code != 429:
                    raise ProviderError(f"HTTP {exc.code} from provider") from exc
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                last = exc
            log.warning("provider attempt %d/%d failed: %s", attempt + 1, self.s.retries, last)
            if attempt + 1 < self.s.retries:
                self.sleep(self.s.backoff * 2 ** attempt)
        raise ProviderError(f"provider unreachable after {self.s.retries} attempts: {last}")

    def complete(self, conversation: Conversation) -> str:
        body = self._post("/chat/completions", {
            "model": self.s.model,
            "temperature": self.s.temperature,
            "messages": [{"role": m["role"], "content": m["content"]} for m in conversation],
        })
        try:
            return body["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("unexpected completion payload") from exc

    def embed(self, text: str) -> np.ndarray:
        body = self._post("/embeddings", {"model": self.s.embed_model, "input": text})
        try:
            vec = np.asarray(body["data"][0]["embedding"], dtype=np.float64)
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("unexpected embedding payload") from exc
        return vec / np.linalg.norm(vec)
