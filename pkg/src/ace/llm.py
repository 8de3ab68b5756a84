"""Chat-completions client for an OpenAI-compatible HTTP endpoint.

Configuration comes from ACE_LLM_BASE_URL / ACE_LLM_MODEL / ACE_LLM_API_KEY.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional, Protocol

import requests


class TransportError(Exception):
    """Raised after all retries against the chat endpoint are exhausted."""


class ChatClient(Protocol):
    def complete(self, messages: list, temperature: float = 0.0) -> str:
        ...


@dataclass
class HttpChatClient:
    """Minimal OpenAI-compatible chat client with 3x exponential-backoff retry."""

    base_url: str
    model: str
    api_key: str = ""
    timeout: float = 60.0
    retries: int = 3
    backoff: float = 1.0
    _session: requests.Session = field(default_factory=requests.Session, repr=False)

    @classmethod
    def from_env(cls) -> "HttpChatClient":
        base_url = os.environ.get("ACE_LLM_BASE_URL")
        model = os.environ.get("ACE_LLM_MODEL")
        if not base_url or not model:
            raise TransportError("ACE_LLM_BASE_URL and ACE_LLM_MODEL must be set for the llm backend")
        return cls(base_url=base_url, model=model, api_key=os.environ.get("ACE_LLM_API_KEY", ""))

    def complete(self, messages: list, temperature: float = 0.0) -> str:
        url = self.base_url.rstrip("/") + "/chat/completions"
        headers = {"content-type": "application/json"}
        if self.api_key:
            headers["authorization"] = f"Bearer {self.api_key}"
        payload = {"model": self.model, "messages": messages, "temperature": temperature}
        last_error: Optional[Exception] = None
        for attempt in range(self.retries):
            try:
                resp = self._session.post(url, json=payload, headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, ValueError) as e:
                last_error = e
                if attempt < self.retries - 1:
                    time.sleep(self.backoff * (2 ** attempt))
        raise TransportError(f"chat completion failed after {self.retries} attempts: {last_error}")


@dataclass
class StubChatClient:
    """Scripted client for tests: replays a fixed sequence of responses."""

    responses: list
    calls: list = field(default_factory=list)

    def complete(self, messages: list, temperature: float = 0.0) -> str:
        self.calls.append(messages)
        if not self.responses:
            raise TransportError("stub exhausted")
        index = min(len(self.calls) - 1, len(self.responses) - 1)
        return self.responses[index]
