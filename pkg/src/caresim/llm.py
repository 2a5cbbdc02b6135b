"""Chat-completions HTTP backend for the text layer.

Works against any endpoint speaking the chat-completions wire convention
(POST {base_url}/chat/completions with a messages array). The credential
is read from an environment variable; base URL, model name, temperature,
timeout, and retry budget are configuration. Timeouts, connection errors,
server errors, and malformed replies are retried up to the budget and then
surfaced as typed errors; client (4xx) errors surface immediately.
"""

from __future__ import annotations

import os
import random
import re
import time
from dataclasses import dataclass

import requests

from .behavior import (
    BehaviorText,
    InteractionContext,
    PerceivedState,
    PerceiveError,
    PromptVariant,
    build_assist_messages,
    build_narrate_messages,
    build_perceive_messages,
)
from .config import ConfigError
from .states import AssistAction, StatusVector, flip_status_bits

API_KEY_ENV_DEFAULT = "CARESIM_API_KEY"


class BackendError(RuntimeError):
    """Base class for HTTP backend failures."""


class BackendTimeout(BackendError):
    pass


class BackendProtocolError(BackendError):
    """Non-2xx response or a reply the backend could not interpret."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message if not raw else f"{message}: {raw!r}")
        self.raw = raw


@dataclass
class HttpBackendConfig:
    base_url: str
    model: str
    temperature: float = 0.7
    timeout_ms: int = 30000
    max_retries: int = 2
    api_key_env: str = API_KEY_ENV_DEFAULT

    def api_key(self) -> str:
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise ConfigError(
                f"HTTP backend selected but the credential variable {self.api_key_env} is not set"
            )
        return key


class ChatCompletionsClient:
    """Minimal chat-completions client with a bounded retry budget."""

    def __init__(self, config: HttpBackendConfig, session: requests.Session | None = None):
        self.config = config
        self._session = session or requests.Session()
        self._api_key = config.api_key()
        self._url = config.base_url.rstrip("/") + "/chat/completions"

    def complete(self, messages: list[dict]) -> str:
        payload = {
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
        }
        headers = {"Authorization": f"Bearer {self._api_key}"}
        timeout_s = self.config.timeout_ms / 1000.0
        attempts = self.config.max_retries + 1
        last_error: BackendError | None = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(min(0.25 * 2 ** (attempt - 1), 2.0))
            try:
                response = self._session.post(
                    self._url, json=payload, headers=headers, timeout=timeout_s
                )
            except requests.Timeout as exc:
                last_error = BackendTimeout(f"request timed out after {timeout_s:.1f}s")
                last_error.__cause__ = exc
                continue
            except requests.ConnectionError as exc:
                last_error = BackendError(f"connection failed: {exc}")
                continue
            if response.status_code >= 500:
                last_error = BackendProtocolError(
                    f"server error {response.status_code}", response.text[:500]
                )
                continue
            if not response.ok:
                raise BackendProtocolError(
                    f"request rejected with status {response.status_code}", response.text[:500]
                )
            try:
                content = response.json()["choices"][0]["message"]["content"]
                if not isinstance(content, str):
                    raise TypeError("content is not a string")
                return content
            except (ValueError, KeyError, IndexError, TypeError):
                last_error = BackendProtocolError("malformed completion reply", response.text[:500])
                continue
        assert last_error is not None
        raise last_error


_BEHAVIOR_REPLY_RE = re.compile(
    r"Nonverbal:\s*(?P<nonverbal>.*?)\s*\nVerbal:\s*(?P<verbal>.*)", re.DOTALL
)
_VECTOR_REPLY_RE = re.compile(r"\[\s*([01])\s*,\s*([01])\s*,\s*([01])\s*,\s*([01])\s*\]")


def parse_behavior_reply(text: str) -> BehaviorText:
    match = _BEHAVIOR_REPLY_RE.search(text)
    if match is None:
        raise BackendProtocolError("reply missing Nonverbal:/Verbal: lines", text)
    return BehaviorText(
        nonverbal=match.group("nonverbal").strip(), verbal=match.group("verbal").strip()
    )


def parse_vector_reply(text: str) -> StatusVector:
    match = _VECTOR_REPLY_RE.search(text)
    if match is None:
        raise PerceiveError("reply contains no binary state vector", text)
    return StatusVector(*(int(g) for g in match.groups()))


class HttpBackend:
    """Text-layer backend driven by a chat-completions endpoint."""

    def __init__(self, config: HttpBackendConfig, session: requests.Session | None = None):
        self.client = ChatCompletionsClient(config, session=session)

    def narrate(self, state: StatusVector, ctx: InteractionContext) -> BehaviorText:
        reply = self.client.complete(build_narrate_messages(state, ctx))
        return parse_behavior_reply(reply)

    def perceive(
        self, behavior: BehaviorText, noise: float, rng: random.Random | None
    ) -> PerceivedState:
        reply = self.client.complete(build_perceive_messages(behavior))
        state = parse_vector_reply(reply)
        if rng is not None:
            state = flip_status_bits(state, noise, rng)
        elif noise > 0.0:
            raise ValueError("an rng is required when perception noise is positive")
        return PerceivedState(state=state, provenance="parsed" if noise == 0.0 else "noisy")

    def render_assist(
        self,
        action: AssistAction,
        ctx: InteractionContext,
        variant: PromptVariant,
        state: StatusVector | None,
    ) -> str:
        if action is AssistAction.NO_ASSISTANCE:
            return ""
        reply = self.client.complete(build_assist_messages(action, ctx, variant, state))
        return reply.strip()
