from __future__ import annotations

import threading
from pathlib import Path
from typing import Callable

import pytest

from personasynth.llm import Gateway, MockTransport
from personasynth.llm.base import Completion, Decoding, MockOptions, RetryPolicy
from personasynth.persona import Persona


class ScriptedTransport:
    """Transport whose reply is computed by a function of the prompt (or raised)."""

    def __init__(self, reply: Callable[[str, Decoding], str], producer: str = "scripted"):
        self.reply = reply
        self.producer = producer
        self.prompts: list[str] = []
        self._lock = threading.Lock()

    def send(self, prompt: str, decoding: Decoding) -> Completion:
        with self._lock:
            self.prompts.append(prompt)
        return Completion(text=self.reply(prompt, decoding), producer=self.producer)


def gateway(transport, max_concurrency: int = 4, attempts: int = 3) -> Gateway:
    return Gateway(transport, max_concurrency=max_concurrency,
                   retry=RetryPolicy(max_attempts=attempts, backoff_base_ms=0), sleep=lambda s: None)


@pytest.fixture
def mock_backend():
    return gateway(MockTransport(MockOptions(), producer="mock:test"))


@pytest.fixture
def persona():
    return Persona.create("a marine biologist who studies coral bleaching in warm shallow reefs")


@pytest.fixture
def scripted():
    def make(reply, producer="scripted", **kw):
        t = ScriptedTransport(reply, producer)
        return gateway(t, **kw), t
    return make


JUDGE_CASSETTE = Path(__file__).parent / "data" / "judge_cassette.jsonl"


@pytest.fixture
def judge_cassette():
    from personasynth.llm import BackendConfig, make_backend

    return make_backend(BackendConfig(kind="replay", cassette_path=str(JUDGE_CASSETTE)))


ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance verdict and assert it."""

    def check(name: str, ok: bool, detail: str) -> None:
        ACCEPTANCE.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
