from __future__ import annotations

import logging
import threading
import time
from typing import Callable, TypeVar

from ..errors import BackendTimeout, RateLimitedExhausted, RetriesExhausted, TransientBackendError
from .base import Completion, Decoding, RetryPolicy, Transport

log = logging.getLogger(__name__)

T = TypeVar("T")


def call_with_retry(
    fn: Callable[[], T],
    policy: RetryPolicy,
    permits: threading.BoundedSemaphore | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[T, int]:
    """Run ``fn`` retrying transient failures; returns ``(result, attempts)``.

    The permit is held only while a request is in flight, never during backoff.
    """
    last: TransientBackendError | None = None
    for attempt in range(1, policy.max_attempts + 1):
        if permits is not None:
            permits.acquire()
        try:
            return fn(), attempt
        except TransientBackendError as exc:
            last = exc
            log.debug("transient backend failure (attempt %d/%d): %s", attempt, policy.max_attempts, exc)
        finally:
            if permits is not None:
                permits.release()
        if attempt < policy.max_attempts:
            sleep(policy.delay_s(attempt))
    assert last is not None
    msg = f"giving up after {policy.max_attempts} attempts: {last}"
    if last.status == 429:
        raise RateLimitedExhausted(msg, policy.max_attempts) from last
    if last.timeout:
        raise BackendTimeout(msg, policy.max_attempts) from last
    raise RetriesExhausted(msg, policy.max_attempts) from last


class Gateway:
    """Thread-safe front door for chat completions.

    Wraps a transport with a bounded permit pool (``max_concurrency``) and
    exponential-backoff retries.  ``usage["attempts"]`` reports how many tries
    the call took.
    """

    def __init__(
        self,
        transport: Transport,
        max_concurrency: int = 4,
        retry: RetryPolicy | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        self.transport = transport
        self.max_concurrency = max_concurrency
        self.retry = retry or RetryPolicy()
        self._permits = threading.BoundedSemaphore(max_concurrency)
        self._sleep = sleep

    @property
    def producer(self) -> str:
        return self.transport.producer

    def complete(self, prompt: str, decoding: Decoding = Decoding()) -> Completion:
        result, attempts = call_with_retry(
            lambda: self.transport.send(prompt, decoding), self.retry, self._permits, self._sleep
        )
        usage = dict(result.usage)
        usage["attempts"] = attempts
        return Completion(text=result.text, producer=result.producer, usage=usage)
