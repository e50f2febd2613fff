"""Chat-completion clients: HTTP endpoint, deterministic mocks, record/replay.

All clients implement `chat(request) -> ChatResponse`.  The HTTP client
speaks the standard OpenAI-compatible /chat/completions JSON wire format,
retries retryable statuses with exponential backoff, and enforces an
optional global token-bucket rate limit.  Record/replay wraps any client
with an on-disk cache keyed by a canonical request hash so whole
evaluation runs are reproducible offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import requests

from .errors import CacheMiss, DecodeError, HttpError, RateLimited, RequestTimeout

ENV_API_BASE = "TOMFORGE_API_BASE"
ENV_API_KEY = "TOMFORGE_API_KEY"

RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[dict[str, str], ...]
    temperature: float = 0.0
    max_tokens: int = 1024
    model_name: str = "default"


@dataclass(frozen=True)
class ChatResponse:
    content: str
    finish_reason: str = "stop"
    prompt_tokens: int = 0
    completion_tokens: int = 0


class ChatClient(Protocol):
    def chat(self, request: ChatRequest) -> ChatResponse: ...


def canonical_request_json(request: ChatRequest) -> str:
    payload = {
        "messages": list(request.messages),
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
        "model": request.model_name,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def request_hash(request: ChatRequest) -> str:
    return hashlib.sha256(canonical_request_json(request).encode("utf-8")).hexdigest()


class TokenBucket:
    """Global requests-per-second limit shared by concurrent callers."""

    def __init__(self, rate_per_sec: float, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        self.rate = rate_per_sec
        self.capacity = max(1.0, rate_per_sec)
        self.tokens = self.capacity
        self.updated = clock()
        self.clock = clock
        self.sleep = sleep
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            self.sleep(wait)


@dataclass
class EndpointConfig:
    base_url: str = ""
    api_key: str = ""
    model_name: str = "default"
    timeout_s: float = 60.0
    max_retries: int = 3
    backoff_s: float = 0.5
    requests_per_sec: float | None = None

    @classmethod
    def from_env(cls, **overrides) -> "EndpointConfig":
        cfg = cls(
            base_url=os.environ.get(ENV_API_BASE, ""),
            api_key=os.environ.get(ENV_API_KEY, ""),
        )
        for k, v in overrides.items():
            setattr(cfg, k, v)
        return cfg


def _requests_transport(url: str, payload: dict, headers: dict, timeout: float) -> tuple[int, str]:
    try:
        resp = requests.post(url, json=payload, headers=headers, timeout=timeout)
    except requests.Timeout as e:
        raise RequestTimeout(str(e)) from e
    except requests.RequestException as e:
        raise HttpError(0, str(e)) from e
    return resp.status_code, resp.text


class HttpChatClient:
    """OpenAI-compatible chat endpoint with retries and rate limiting."""

    def __init__(self, config: EndpointConfig,
                 transport: Callable[[str, dict, dict, float], tuple[int, str]] = _requests_transport,
                 sleep: Callable[[float], None] = time.sleep):
        if not config.base_url:
            raise HttpError(0, f"no endpoint configured (set {ENV_API_BASE} or pass base_url)")
        self.config = config
        self.transport = transport
        self.sleep = sleep
        self.bucket = (
            TokenBucket(config.requests_per_sec) if config.requests_per_sec else None
        )
        self.retry_count = 0  # cumulative, for logging/tests

    def chat(self, request: ChatRequest) -> ChatResponse:
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": request.model_name or self.config.model_name,
            "messages": list(request.messages),
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"

        last_status = None
        for attempt in range(self.config.max_retries + 1):
            if self.bucket:
                self.bucket.acquire()
            status, body = self.transport(url, payload, headers, self.config.timeout_s)
            if status in RETRYABLE_STATUSES:
                last_status = status
                if attempt < self.config.max_retries:
                    self.retry_count += 1
                    self.sleep(self.config.backoff_s * (2 ** attempt))
                continue
            if status != 200:
                raise HttpError(status, body[:500])
            return _decode_chat_body(body)
        if last_status == 429:
            raise RateLimited(f"still rate limited after {self.config.max_retries} retries")
        raise HttpError(last_status or 0, f"retries exhausted ({self.config.max_retries})")


def _decode_chat_body(body: str) -> ChatResponse:
    try:
        data = json.loads(body)
        choice = data["choices"][0]
        usage = data.get("usage") or {}
        return ChatResponse(
            content=choice["message"]["content"],
            finish_reason=choice.get("finish_reason", "stop"),
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
        )
    except (KeyError, IndexError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise DecodeError(f"bad chat-completion body: {e}") from e


class MockChatClient:
    """Deterministic in-process client driven by a handler function."""

    def __init__(self, handler: Callable[[ChatRequest], str]):
        self.handler = handler
        self.calls: list[ChatRequest] = []
        self._lock = threading.Lock()

    def chat(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            self.calls.append(request)
        content = self.handler(request)
        return ChatResponse(content=content, completion_tokens=len(content.split()))


@dataclass
class RecordReplayClient:
    """Persistent request-hash -> response cache around another client.

    record: call through and persist every response.
    replay: never touch the inner client; unseen requests raise CacheMiss.
    passthrough: plain delegation.
    """

    inner: ChatClient | None
    mode: str  # record | replay | passthrough
    store_path: str
    _store: dict[str, dict] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        if self.mode not in ("record", "replay", "passthrough"):
            raise ValueError(f"bad record/replay mode {self.mode!r}")
        if self.mode in ("replay", "record") and os.path.exists(self.store_path):
            with open(self.store_path, encoding="utf-8") as f:
                self._store = json.load(f)

    def chat(self, request: ChatRequest) -> ChatResponse:
        if self.mode == "passthrough":
            return self.inner.chat(request)
        key = request_hash(request)
        if self.mode == "replay":
            with self._lock:
                entry = self._store.get(key)
            if entry is None:
                raise CacheMiss(key)
            return ChatResponse(**entry)
        response = self.inner.chat(request)
        with self._lock:
            self._store[key] = {
                "content": response.content,
                "finish_reason": response.finish_reason,
                "prompt_tokens": response.prompt_tokens,
                "completion_tokens": response.completion_tokens,
            }
            tmp = self.store_path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump(self._store, f, sort_keys=True)
            os.replace(tmp, self.store_path)
        return response
