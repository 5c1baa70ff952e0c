"""Minimal chat-completion HTTP client.

Speaks the common ``POST {base_url}/chat/completions`` JSON protocol. All
connection parameters are constructor arguments with environment-variable
defaults; the API key is only ever read from the environment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import httpx

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4o-mini"
DEFAULT_TIMEOUT_SECONDS = 15.0

BASE_URL_ENV = "SURVEYLOOP_LLM_BASE_URL"
MODEL_ENV = "SURVEYLOOP_LLM_MODEL"
API_KEY_ENV = "SURVEYLOOP_API_KEY"


class LlmError(Exception):
    """The completion endpoint failed or returned an unusable payload."""


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str


class ChatCompletionClient:
    def __init__(
        self,
        base_url: str | None = None,
        model: str | None = None,
        timeout: float = DEFAULT_TIMEOUT_SECONDS,
        api_key_env: str = API_KEY_ENV,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = (base_url or os.environ.get(BASE_URL_ENV, DEFAULT_BASE_URL)).rstrip("/")
        self.model = model or os.environ.get(MODEL_ENV, DEFAULT_MODEL)
        self.timeout = timeout
        self.api_key_env = api_key_env
        self._transport = transport

    def complete(self, messages: list[ChatMessage], temperature: float = 0.7) -> str:
        url = f"{self.base_url}/chat/completions"
        payload = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": temperature,
        }
        headers = {}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
                response = client.post(url, json=payload, headers=headers)
            response.raise_for_status()
            data = response.json()
        except httpx.HTTPError as exc:
            raise LlmError(f"chat completion request failed: {exc}") from exc
        except ValueError as exc:
            raise LlmError(f"chat completion returned invalid JSON: {exc}") from exc
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise LlmError(f"unexpected completion payload shape: {data!r}") from exc
        if not isinstance(content, str) or not content.strip():
            raise LlmError("completion content empty")
        return content.strip()
