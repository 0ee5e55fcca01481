"""Minimal HTTP transport layer with retries and a shared token bucket.

Clients are written against the tiny :class:`Transport` protocol so tests can
substitute canned fixture responses without a network stack.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Protocol

from .errors import RateBudgetError, RetryableFetchError


@dataclass
class Response:
    status: int
    headers: dict[str, str]
    body: Any  # decoded JSON, or None


class Transport(Protocol):
    def get(self, url: str, params: Optional[dict] = None) -> Response: ...


class TokenBucket:
    """Thread-safe token bucket limiting request rate across fetchers."""

    def __init__(self, capacity: float, refill_per_sec: float,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        self.capacity = float(capacity)
        self.refill_per_sec = float(refill_per_sec)
        self._tokens = float(capacity)
        self._last = clock()
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(
                    self.capacity,
                    self._tokens + (now - self._last) * self.refill_per_sec,
                )
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.refill_per_sec
            self._sleep(wait)


@dataclass
class RequestsTransport:
    """Live transport backed by ``requests`` with exponential backoff.

    Retries transient failures (5xx, connection errors) and secondary rate
    limits (429 / Retry-After); raises :class:`RateBudgetError` when the
    primary rate limit is exhausted.
    """

    headers: dict[str, str] = field(default_factory=dict)
    max_retries: int = 4
    backoff_base: float = 1.0
    bucket: Optional[TokenBucket] = None
    timeout: float = 30.0
    sleep: Callable[[float], None] = time.sleep

    def get(self, url: str, params: Optional[dict] = None) -> Response:
        import requests

        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries + 1):
            if self.bucket is not None:
                self.bucket.acquire()
            try:
                resp = requests.get(
                    url, params=params, headers=self.headers, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = exc
                self.sleep(self.backoff_base * 2**attempt)
                continue

            headers = {k: v for k, v in resp.headers.items()}
            if resp.status_code == 403 and headers.get("X-RateLimit-Remaining") == "0":
                raise RateBudgetError(
                    f"rate limit exhausted for {url}",
                    reset_at=headers.get("X-RateLimit-Reset"),
                )
            if resp.status_code == 429 or (
                resp.status_code == 403 and "Retry-After" in headers
            ):
                self.sleep(float(headers.get("Retry-After", self.backoff_base * 2**attempt)))
                continue
            if resp.status_code >= 500:
                self.sleep(self.backoff_base * 2**attempt)
                continue

            body = None
            if resp.content:
                try:
                    body = resp.json()
                except ValueError:
                    body = None
            return Response(status=resp.status_code, headers=headers, body=body)
        raise RetryableFetchError(f"giving up on {url} after retries: {last_error}")
