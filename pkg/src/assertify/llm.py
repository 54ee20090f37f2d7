"""Chat-completion access: live HTTP, deterministic mock, record/replay.

Every inference is keyed by a fingerprint over (model name, system text,
ordered messages) — sampling parameters excluded — so recorded sessions
replay regardless of provider-default drift. Cost is always derived from
the config's price table: tokens_in/1000 * price_in + tokens_out/1000 *
price_out.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

API_KEY_ENV = "ASSERTIFY_API_KEY"
CASSETTE_SCHEMA_VERSION = 1


class TransportError(RuntimeError):
    pass


class ReplayMiss(KeyError):
    def __init__(self, fingerprint: str):
        super().__init__(fingerprint)
        self.fingerprint = fingerprint

    def __str__(self):
        return f"no recorded response for fingerprint {self.fingerprint}"


class ConfigurationError(RuntimeError):
    pass


# -- tokenization ------------------------------------------------------------


def fallback_token_count(text: str) -> int:
    """Deterministic whitespace+punctuation token count."""
    return len(re.findall(r"\w+|[^\w\s]", text))


_TOKENIZERS: dict[str, object] = {"fallback": fallback_token_count}


def register_tokenizer(name: str, fn) -> None:
    _TOKENIZERS[name] = fn


def get_tokenizer(name: str | None):
    """(tokenizer name, callable); unknown/None falls back."""
    if name and name in _TOKENIZERS:
        return name, _TOKENIZERS[name]
    return "fallback", fallback_token_count


# -- configuration and results ----------------------------------------------


@dataclass
class ModelConfig:
    name: str
    context_limit: int = 16385
    price_in: float = 0.0  # currency per 1,000 prompt tokens
    price_out: float = 0.0  # currency per 1,000 completion tokens
    temperature: float | None = None  # None = provider default
    max_attempts: int = 3
    backoff_seconds: float = 1.0
    rate_limit_per_minute: int = 60
    tokenizer: str | None = None
    endpoint: str | None = None  # live chat-completion URL
    response_reserve: int = 1024

    def __post_init__(self):
        if self.context_limit <= 0:
            raise ValueError("context_limit must be positive")
        if self.price_in < 0 or self.price_out < 0:
            raise ValueError("prices must be non-negative")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")

    def cost(self, tokens_in: int, tokens_out: int) -> float:
        return tokens_in / 1000 * self.price_in + tokens_out / 1000 * self.price_out

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)


@dataclass
class InferenceResult:
    raw_text: str
    tokens_in: int
    tokens_out: int
    latency_ms: int
    cost: float
    backend: str  # live | mock | replay
    request_fingerprint: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def request_fingerprint(
    model_name: str, system_text: str, messages: list[tuple[str, str]]
) -> str:
    """Stable hash over semantic request identity."""
    payload = json.dumps(
        {
            "model": model_name,
            "system": system_text,
            "messages": [[role, text] for role, text in messages],
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# -- rate limiting -----------------------------------------------------------


class RateLimiter:
    """Sliding 60-second window; shared across threads."""

    def __init__(self, per_minute: int, clock=time.monotonic, sleep=time.sleep):
        self.per_minute = per_minute
        self._clock = clock
        self._sleep = sleep
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= 60.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.per_minute:
                    self._stamps.append(now)
                    return
                self._sleep(60.0 - (now - self._stamps[0]) + 0.01)


# -- backends ----------------------------------------------------------------


class MockBackend:
    """Deterministic backend for tests: fixed text, echo, or a rule fn.

    rule: callable(system_text, messages) -> reply text. fixed_text wins
    when set; echo returns the final user message.
    """

    name = "mock"

    def __init__(self, fixed_text: str | None = None, echo: bool = False, rule=None):
        self.fixed_text = fixed_text
        self.echo = echo
        self.rule = rule
        self.requests: list[tuple[str, list[tuple[str, str]]]] = []

    def complete(self, model: ModelConfig, system_text: str,
                 messages: list[tuple[str, str]]) -> tuple[str, int | None, int | None, int]:
        self.requests.append((system_text, [tuple(m) for m in messages]))
        if self.fixed_text is not None:
            reply = self.fixed_text
        elif self.rule is not None:
            reply = self.rule(system_text, messages)
        elif self.echo:
            reply = messages[-1][1]
        else:
            reply = "[]"
        return reply, None, None, 0


class ReplayBackend:
    """Returns recorded responses keyed by request fingerprint."""

    name = "replay"

    def __init__(self, cassette_path: str | Path):
        self.entries: dict[str, dict] = {}
        path = Path(cassette_path)
        if not path.exists():
            raise ConfigurationError(f"cassette not found: {path}")
        with path.open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self.entries[entry["fingerprint"]] = entry  # last write wins

    def complete(self, model: ModelConfig, system_text: str,
                 messages: list[tuple[str, str]]) -> tuple[str, int | None, int | None, int]:
        fp = request_fingerprint(model.name, system_text, messages)
        entry = self.entries.get(fp)
        if entry is None:
            raise ReplayMiss(fp)
        return (
            entry["response"],
            entry.get("tokens_in"),
            entry.get("tokens_out"),
            entry.get("latency_ms", 0),
        )


class LiveBackend:
    """Chat-completion HTTP backend with retry on transient failures."""

    name = "live"

    def __init__(self, api_key: str | None = None, session=None):
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._session = session

    def _post(self, url: str, payload: dict, timeout: float):
        import requests

        if self._session is not None:
            return self._session.post(url, json=payload, timeout=timeout)
        return requests.post(
            url,
            json=payload,
            headers={"Authorization": f"Bearer {self.api_key}"},
            timeout=timeout,
        )

    def complete(self, model: ModelConfig, system_text: str,
                 messages: list[tuple[str, str]]) -> tuple[str, int | None, int | None, int]:
        if not self.api_key:
            raise ConfigurationError(
                f"live backend requires an API key ({API_KEY_ENV})"
            )
        if not model.endpoint:
            raise ConfigurationError(f"model {model.name} has no endpoint configured")
        wire = [{"role": "system", "content": system_text}]
        wire += [{"role": role, "content": text} for role, text in messages]
        payload: dict = {"model": model.name, "messages": wire}
        if model.temperature is not None:
            payload["temperature"] = model.temperature
        last_error: Exception | None = None
        for attempt in range(model.max_attempts):
            if attempt:
                time.sleep(model.backoff_seconds * (2 ** (attempt - 1)))
            started = time.monotonic()
            try:
                resp = self._post(model.endpoint, payload, timeout=300)
            except Exception as e:  # connection-level failure
                last_error = e
                continue
            latency_ms = int((time.monotonic() - started) * 1000)
            if resp.status_code in (429, 500, 502, 503, 504):
                last_error = TransportError(f"HTTP {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            body = resp.json()
            text = body["choices"][0]["message"]["content"]
            usage = body.get("usage", {})
            return (
                text,
                usage.get("prompt_tokens"),
                usage.get("completion_tokens"),
                latency_ms,
            )
        raise TransportError(f"retries exhausted: {last_error}")


class RecordingBackend:
    """Wraps another backend and appends every exchange to a cassette."""

    def __init__(self, inner, cassette_path: str | Path):
        self.inner = inner
        self.name = inner.name
        self.path = Path(cassette_path)
        self._lock = threading.Lock()
        self._seen: set[str] = set()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.touch(exist_ok=True)

    def complete(self, model, system_text, messages):
        reply, tin, tout, latency = self.inner.complete(model, system_text, messages)
        fp = request_fingerprint(model.name, system_text, messages)
        entry = {
            "schema": CASSETTE_SCHEMA_VERSION,
            "fingerprint": fp,
            "model": model.name,
            "messages": [["system", system_text]]
            + [[r, t] for r, t in messages],
            "response": reply,
            "tokens_in": tin,
            "tokens_out": tout,
            "latency_ms": latency,
        }
        with self._lock:
            if fp in self._seen:
                import logging

                logging.getLogger(__name__).warning(
                    "duplicate cassette fingerprint %s (last write wins)", fp
                )
            self._seen.add(fp)
            with self.path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(entry, ensure_ascii=False) + "\n")
        return reply, tin, tout, latency


# -- client ------------------------------------------------------------------


@dataclass
class LLMClient:
    model: ModelConfig
    backend: object
    rate_limiter: RateLimiter | None = None
    total_cost: float = 0.0
    total_latency_ms: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def infer(self, system_text: str, messages: list[tuple[str, str]]) -> InferenceResult:
        """One chat completion through whichever backend is configured."""
        if self.rate_limiter is not None and getattr(self.backend, "name", "") == "live":
            self.rate_limiter.acquire()
        reply, tin, tout, latency = self.backend.complete(
            self.model, system_text, messages
        )
        if tin is None:
            _, counter = get_tokenizer(self.model.tokenizer)
            tin = counter(system_text) + sum(counter(t) for _, t in messages)
        if tout is None:
            _, counter = get_tokenizer(self.model.tokenizer)
            tout = counter(reply)
        fp = request_fingerprint(self.model.name, system_text, messages)
        with self._lock:
            self.total_cost += self.model.cost(tin, tout)
            self.total_latency_ms += latency
        return InferenceResult(
            raw_text=reply,
            tokens_in=tin,
            tokens_out=tout,
            latency_ms=latency,
            cost=self.model.cost(tin, tout),
            backend=getattr(self.backend, "name", "unknown"),
            request_fingerprint=fp,
        )
