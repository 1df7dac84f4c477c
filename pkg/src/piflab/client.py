"""Chat-completion backends: a real HTTP client and a scripted stand-in.

Both expose the same single-attempt ``send(request) -> ChatResponse``
surface; ``complete`` wraps any backend with exponential-backoff retries.
Error kinds stay distinguishable end to end:

* ``TransportError``: connection failures, timeouts, HTTP 5xx (retryable)
* ``RateLimitError``: HTTP 429 (retryable)
* ``HttpStatusError``: other non-success statuses (not retryable)
* ``MalformedResponseError``: 200 with an unusable payload (not retryable)

Credentials are read from the environment at send time and never stored in
any report structure.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import requests

from .distributions import CategoricalDist
from .prng import hash64, uniform_at


class BackendError(Exception):
    """Base class for backend failures."""


class TransportError(BackendError):
    pass


class RateLimitError(BackendError):
    pass


class HttpStatusError(BackendError):
    def __init__(self, status: int, detail: str = "") -> None:
        super().__init__(f"unexpected HTTP status {status}: {detail}")
        self.status = status


class MalformedResponseError(BackendError):
    pass


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay_s: float = 0.5
    max_delay_s: float = 8.0

    def delay(self, attempt: int) -> float:
        # attempt is 1-based; first retry waits base, then doubles.
        return min(self.base_delay_s * 2.0 ** (attempt - 1), self.max_delay_s)


@dataclass(frozen=True)
class ChatRequest:
    system_text: str
    user_text: str
    temperature: float | None = None
    max_output_tokens: int | None = None
    request_tag: str = ""


@dataclass(frozen=True)
class ChatResponse:
    text: str
    reasoning_text: str | None = None
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency_ms: int = 0
    attempts: int = 1


class RateLimiter:
    """Thread-safe minimum spacing between sends."""

    def __init__(self, per_second: float) -> None:
        if per_second <= 0:
            raise ValueError("per_second must be > 0")
        self._interval = 1.0 / per_second
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            wait = self._next_at - now
            self._next_at = max(now, self._next_at) + self._interval
        if wait > 0:
            time.sleep(wait)


class HttpBackend:
    """Chat-completions JSON over HTTP."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "",
        timeout_s: float = 60.0,
        retry: RetryPolicy = RetryPolicy(),
        rate_limiter: RateLimiter | None = None,
    ) -> None:
        if not endpoint:
            raise ValueError("endpoint must be non-empty")
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self.retry = retry
        self.rate_limiter = rate_limiter

    def _payload(self, req: ChatRequest) -> dict:
        messages = []
        if req.system_text:
            messages.append({"role": "system", "content": req.system_text})
        messages.append({"role": "user", "content": req.user_text})
        payload: dict = {"model": self.model, "messages": messages}
        if req.temperature is not None:
            payload["temperature"] = req.temperature
        if req.max_output_tokens is not None:
            payload["max_tokens"] = req.max_output_tokens
        return payload

    def send(self, req: ChatRequest) -> ChatResponse:
        if self.rate_limiter is not None:
            self.rate_limiter.acquire()
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        start = time.monotonic()
        try:
            resp = requests.post(
                self.endpoint,
                json=self._payload(req),
                headers=headers,
                timeout=self.timeout_s,
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        latency_ms = int((time.monotonic() - start) * 1000)
        if resp.status_code == 429:
            raise RateLimitError("rate limited (HTTP 429)")
        if resp.status_code >= 500:
            raise TransportError(f"server error (HTTP {resp.status_code})")
        if resp.status_code != 200:
            raise HttpStatusError(resp.status_code, resp.text[:200])
        try:
            data = resp.json()
            message = data["choices"][0]["message"]
            text = message["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"unusable payload: {exc}") from exc
        if not isinstance(text, str):
            raise MalformedResponseError("message content is not a string")
        reasoning = message.get("reasoning_content") or message.get("reasoning")
        usage = data.get("usage") or {}
        return ChatResponse(
            text=text,
            reasoning_text=reasoning if isinstance(reasoning, str) else None,
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
            latency_ms=latency_ms,
        )


ScriptEntry = Union[str, Exception, Callable[[ChatRequest], str]]


class MockBackend:
    """In-process scripted backend with the same send() shape.

    The script is either a callable (request -> text) or a sequence whose
    entries are response texts, exceptions to raise, or callables; sequence
    entries are consumed one per send under a lock, and the last entry
    repeats once the script is exhausted.
    """

    def __init__(
        self,
        script: Callable[[ChatRequest], str] | Sequence[ScriptEntry],
        retry: RetryPolicy = RetryPolicy(max_attempts=3, base_delay_s=0.0),
    ) -> None:
        if callable(script):
            self._fn: Callable[[ChatRequest], str] | None = script
            self._entries: list[ScriptEntry] = []
        else:
            if len(script) == 0:
                raise ValueError("script sequence must be non-empty")
            self._fn = None
            self._entries = list(script)
        self._lock = threading.Lock()
        self._calls = 0
        self.retry = retry
        self.rate_limiter = None

    @property
    def calls(self) -> int:
        return self._calls

    def send(self, req: ChatRequest) -> ChatResponse:
        with self._lock:
            index = self._calls
            self._calls += 1
        if self._fn is not None:
            entry: ScriptEntry = self._fn
        else:
            entry = self._entries[min(index, len(self._entries) - 1)]
        if isinstance(entry, Exception):
            raise entry
        text = entry(req) if callable(entry) else entry
        return ChatResponse(text=text, completion_tokens=len(text.split()))

    @classmethod
    def always(cls, text: str) -> "MockBackend":
        return cls(lambda req: text)

    @classmethod
    def cycling(cls, texts: Sequence[str]) -> "MockBackend":
        texts = list(texts)
        if not texts:
            raise ValueError("texts must be non-empty")
        counter = {"n": 0}
        lock = threading.Lock()

        def _fn(req: ChatRequest) -> str:
            with lock:
                i = counter["n"]
                counter["n"] += 1
            return texts[i % len(texts)]

        return cls(_fn)

    @classmethod
    def sampling(cls, target: CategoricalDist, seed: int = 0) -> "MockBackend":
        """Answer with a label drawn from ``target``, keyed by the request tag.

        Requests tagged "rep:trial" map to a fixed stream position, so results
        do not depend on scheduling order; untagged requests fall back to the
        call counter.
        """
        counter = {"n": 0}
        lock = threading.Lock()

        def _fn(req: ChatRequest) -> str:
            parts = req.request_tag.split(":")
            if len(parts) == 2 and all(p.isdigit() for p in parts):
                u = uniform_at(hash64(seed, int(parts[0]), int(parts[1])), 0)
            else:
                with lock:
                    i = counter["n"]
                    counter["n"] += 1
                u = uniform_at(hash64(seed, 1 << 40, i), 0)
            acc = 0.0
            label = target.labels[-1]
            for lab, p in zip(target.labels, target.probs):
                acc += p
                if u < acc:
                    label = lab
                    break
            return f"<answer>{label}</answer>"

        return cls(_fn)


Backend = Union[HttpBackend, MockBackend]


def complete(backend: Backend, req: ChatRequest) -> ChatResponse:
    """Send with retries per the backend's policy; latency covers all tries."""
    policy = backend.retry
    start = time.monotonic()
    attempt = 0
    while True:
        attempt += 1
        try:
            resp = backend.send(req)
        except (TransportError, RateLimitError):
            if attempt >= policy.max_attempts:
                raise
            time.sleep(policy.delay(attempt))
            continue
        latency_ms = int((time.monotonic() - start) * 1000)
        return replace(resp, attempts=attempt, latency_ms=latency_ms)
