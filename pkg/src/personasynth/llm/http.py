"""OpenAI-compatible chat-completions and embeddings over HTTP."""

from __future__ import annotations

import os

import httpx
import numpy as np

from ..errors import AuthError, BackendConfigError, BackendError, DimensionMismatch, TransientBackendError
from .base import BackendConfig, Completion, Decoding, EmbeddingConfig

RETRYABLE_STATUS = {408, 409, 429, 500, 502, 503, 504}


def _api_key(env_var: str) -> str:
    key = os.environ.get(env_var)
    if not key:
        raise AuthError(f"environment variable {env_var} is not set")
    return key


def _post(client: httpx.Client, url: str, payload: dict, headers: dict) -> dict:
    try:
        resp = client.post(url, json=payload, headers=headers)
    except httpx.TimeoutException as exc:
        raise TransientBackendError(f"timeout calling {url}", timeout=True) from exc
    except httpx.TransportError as exc:
        raise TransientBackendError(f"transport error calling {url}: {exc}") from exc
    if resp.status_code in (401, 403):
        raise AuthError(f"{url} rejected credentials (HTTP {resp.status_code})")
    if resp.status_code in RETRYABLE_STATUS or resp.status_code >= 500:
        raise TransientBackendError(f"HTTP {resp.status_code} from {url}", status=resp.status_code)
    if resp.status_code >= 400:
        raise BackendConfigError(f"HTTP {resp.status_code} from {url}: {resp.text[:200]}")
    try:
        return resp.json()
    except ValueError as exc:
        raise BackendError(f"non-JSON body from {url}") from exc


class OpenAICompatibleTransport:
    def __init__(self, config: BackendConfig, client: httpx.Client | None = None):
        self.config = config
        self.producer = config.model_name
        self._client = client or httpx.Client(timeout=config.timeout_ms / 1000.0)
        self._url = config.base_url.rstrip("/") + "/chat/completions"

    def send(self, prompt: str, decoding: Decoding) -> Completion:
        headers = {"Authorization": f"Bearer {_api_key(self.config.api_key_env_var)}"}
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": decoding.temperature,
            "max_tokens": decoding.max_tokens,
        }
        if decoding.seed is not None:
            payload["seed"] = decoding.seed
        body = _post(self._client, self._url, payload, headers)
        try:
            text = body["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError("unexpected chat-completions response shape") from exc
        usage = body.get("usage") or {}
        return Completion(
            text=text,
            producer=self.producer,
            usage={
                "prompt_tokens": int(usage.get("prompt_tokens", 0)),
                "completion_tokens": int(usage.get("completion_tokens", 0)),
            },
        )


class OpenAICompatibleEmbeddingTransport:
    def __init__(self, config: EmbeddingConfig, client: httpx.Client | None = None):
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout_ms / 1000.0)
        self._url = config.base_url.rstrip("/") + "/embeddings"

    def send(self, texts: list[str]) -> np.ndarray:
        headers = {"Authorization": f"Bearer {_api_key(self.config.api_key_env_var)}"}
        payload = {"model": self.config.model_name, "input": texts, "dimensions": self.config.dim}
        body = _post(self._client, self._url, payload, headers)
        try:
            rows = sorted(body["data"], key=lambda r: r.get("index", 0))
            vectors = np.array([r["embedding"] for r in rows], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError("unexpected embeddings response shape") from exc
        if vectors.ndim != 2 or vectors.shape != (len(texts), self.config.dim):
            raise DimensionMismatch(f"expected {len(texts)}x{self.config.dim} embeddings, got {vectors.shape}")
        return vectors
