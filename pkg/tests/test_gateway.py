import threading
import time

import pytest

from personasynth.errors import (
    AuthError,
    BackendTimeout,
    RateLimitedExhausted,
    RetriesExhausted,
    TransientBackendError,
)
from personasynth.llm import Gateway
from personasynth.llm.base import Completion, RetryPolicy
from personasynth.llm.gateway import call_with_retry


class FlakyTransport:
    producer = "flaky"

    def __init__(self, failures):
        self.failures = list(failures)
        self.calls = 0

    def send(self, prompt, decoding):
        self.calls += 1
        if self.failures:
            raise self.failures.pop(0)
        return Completion(prompt.upper(), self.producer, {"prompt_tokens": 1})


def test_retry_then_success_reports_attempts():
    delays = []
    t = FlakyTransport([TransientBackendError("x", status=503), TransientBackendError("y", timeout=True)])
    g = Gateway(t, retry=RetryPolicy(max_attempts=5, backoff_base_ms=100), sleep=delays.append)
    out = g.complete("hi")
    assert out.text == "HI" and out.usage["attempts"] == 3 and out.usage["prompt_tokens"] == 1
    assert delays == [0.1, 0.2]


@pytest.mark.parametrize("exc, expected", [
    (TransientBackendError("rl", status=429), RateLimitedExhausted),
    (TransientBackendError("slow", timeout=True), BackendTimeout),
    (TransientBackendError("5xx", status=502), RetriesExhausted),
])
def test_exhaustion_maps_to_specific_errors(exc, expected):
    t = FlakyTransport([exc] * 3)
    g = Gateway(t, retry=RetryPolicy(max_attempts=3, backoff_base_ms=0), sleep=lambda s: None)
    with pytest.raises(expected) as ei:
        g.complete("p")
    assert ei.value.attempts == 3 and t.calls == 3


def test_fatal_errors_are_not_retried():
    t = FlakyTransport([AuthError("denied")])
    g = Gateway(t, retry=RetryPolicy(max_attempts=5, backoff_base_ms=0), sleep=lambda s: None)
    with pytest.raises(AuthError):
        g.complete("p")
    assert t.calls == 1


def test_backoff_policy():
    p = RetryPolicy(max_attempts=4, backoff_base_ms=500)
    assert [p.delay_s(i) for i in (1, 2, 3)] == [0.5, 1.0, 2.0]
    with pytest.raises(ValueError):
        RetryPolicy(max_attempts=0)


def test_in_flight_requests_never_exceed_limit():
    lock, state = threading.Lock(), {"now": 0, "peak": 0}

    class Slow:
        producer = "slow"

        def send(self, prompt, decoding):
            with lock:
                state["now"] += 1
                state["peak"] = max(state["peak"], state["now"])
            time.sleep(0.01)
            with lock:
                state["now"] -= 1
            return Completion("ok", "slow")

    g = Gateway(Slow(), max_concurrency=3)
    threads = [threading.Thread(target=g.complete, args=(f"p{i}",)) for i in range(20)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert 1 <= state["peak"] <= 3


def test_permit_released_during_backoff():
    permits = threading.BoundedSemaphore(1)
    seen = []

    def sleep(_):
        # another caller must be able to take the only permit while we wait
        ok = permits.acquire(blocking=False)
        seen.append(ok)
        if ok:
            permits.release()

    fails = [TransientBackendError("x", status=503)]

    def fn():
        if fails:
            raise fails.pop()
        return "done"

    assert call_with_retry(fn, RetryPolicy(3, 0), permits, sleep) == ("done", 2)
    assert seen == [True]


def test_gateway_rejects_bad_concurrency():
    with pytest.raises(ValueError):
        Gateway(FlakyTransport([]), max_concurrency=0)
