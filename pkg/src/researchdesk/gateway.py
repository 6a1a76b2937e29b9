"""Uniform chat-completion interface: provider abstraction, tool-call support,
token estimation, and daily budget enforcement.

Two providers prove the seam: :class:`HttpChatProvider` speaks an
OpenAI-compatible chat-completions API, :class:`ScriptedProvider` replays a
canned response sequence for deterministic tests and demos.
"""

from __future__ import annotations

import json
import math
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Literal, Optional, Protocol, Sequence

import requests

from .errors import (
    ContractViolation,
    MalformedResponseError,
    ProviderRejectedError,
    ProviderUnreachableError,
    ScriptExhaustedError,
)
from .model import ChatMessage, FrozenWireModel, ToolCall

UNLIMITED = -1

DEFAULT_DAILY_LIMIT = 200_000


class ModelRef(FrozenWireModel):
    provider_id: str
    model_name: str


def parse_model_ref(ref: str) -> ModelRef:
    """Split a 'provider/model' reference string."""
    provider_id, sep, model_name = ref.partition("/")
    if not sep or not provider_id or not model_name:
        raise ContractViolation(f"model reference {ref!r} must look like provider/model")
    return ModelRef(provider_id=provider_id, model_name=model_name)


class ToolSummary(FrozenWireModel):
    """What the model sees about a callable tool."""

    name: str
    description: str
    input_schema: dict


class ChatRequest(FrozenWireModel):
    messages: tuple[ChatMessage, ...]
    tool_descriptors: tuple[ToolSummary, ...] = ()
    temperature: float = 0.7
    max_output_tokens: int = 1024


class Usage(FrozenWireModel):
    input_tokens: int = 0
    output_tokens: int = 0


class ChatResponse(FrozenWireModel):
    kind: Literal["text", "tool_calls"]
    text: Optional[str] = None
    tool_calls: Optional[tuple[ToolCall, ...]] = None
    usage: Usage = Usage()


class Credentials(FrozenWireModel):
    api_key: Optional[str] = None


def estimate_tokens(text: str) -> int:
    """Heuristic used when the provider reports no usage: ceil(chars / 4)."""
    return math.ceil(len(text) / 4)


def _check_request(request: ChatRequest) -> None:
    if not request.messages:
        raise ContractViolation("request must contain at least one message")
    if request.messages[0].role != "system":
        raise ContractViolation("first message must have role system")
    if not 0 <= request.temperature <= 2:
        raise ContractViolation("temperature must be in [0, 2]")
    if request.max_output_tokens < 1:
        raise ContractViolation("maxOutputTokens must be positive")


class Provider(Protocol):
    def complete(
        self, model_ref: ModelRef, request: ChatRequest, credentials: Credentials
    ) -> ChatResponse: ...


class ScriptedProvider:
    """Replays a fixed response sequence; calls past the end raise."""

    def __init__(self, script: Sequence[ChatResponse]):
        if not script:
            raise ContractViolation("script must be non-empty")
        self._script = list(script)
        self._cursor = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path) -> "ScriptedProvider":
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
        return cls([ChatResponse.model_validate(step) for step in raw])

    def complete(self, model_ref, request, credentials) -> ChatResponse:
        with self._lock:
            if self._cursor >= len(self._script):
                raise ScriptExhaustedError(
                    f"script exhausted after {len(self._script)} responses"
                )
            response = self._script[self._cursor]
            self._cursor += 1
        if response.usage.input_tokens or response.usage.output_tokens:
            return response
        estimated = Usage(
            input_tokens=estimate_tokens(
                "".join(m.text or "" for m in request.messages)
            ),
            output_tokens=estimate_tokens(response.text or ""),
        )
        return response.model_copy(update={"usage": estimated})


class HttpChatProvider:
    """OpenAI-compatible chat-completions client (POST {base}/chat/completions)."""

    def __init__(self, base_url: str, api_key: str = "", timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout
        self._session = requests.Session()

    def complete(self, model_ref, request, credentials) -> ChatResponse:
        key = credentials.api_key or self.api_key
        payload = {
            "model": model_ref.model_name,
            "messages": [_to_openai_message(m) for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        if request.tool_descriptors:
            payload["tools"] = [
                {
                    "type": "function",
                    "function": {
                        "name": t.name,
                        "description": t.description,
                        "parameters": t.input_schema,
                    },
                }
                for t in request.tool_descriptors
            ]
        try:
            http_response = self._session.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {key}"} if key else {},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnreachableError(str(exc)) from exc
        if http_response.status_code in (401, 403, 429):
            raise ProviderRejectedError(
                f"provider returned {http_response.status_code}"
            )
        if http_response.status_code >= 400:
            raise ProviderUnreachableError(
                f"provider returned {http_response.status_code}"
            )
        try:
            body = http_response.json()
            return _from_openai_response(body, request)
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponseError(f"cannot parse provider response: {exc}") from exc


def _to_openai_message(message: ChatMessage) -> dict:
    wire: dict = {"role": message.role}
    if message.role == "tool":
        wire["tool_call_id"] = message.tool_call_id
        wire["content"] = message.text or ""
        return wire
    wire["content"] = message.text or ""
    if message.tool_calls:
        wire["tool_calls"] = [
            {
                "id": call.id,
                "type": "function",
                "function": {"name": call.tool_name, "arguments": call.arguments_json},
            }
            for call in message.tool_calls
        ]
    return wire


def _from_openai_response(body: dict, request: ChatRequest) -> ChatResponse:
    choice = body["choices"][0]["message"]
    usage_raw = body.get("usage") or {}
    usage = Usage(
        input_tokens=usage_raw.get(
            "prompt_tokens",
            estimate_tokens("".join(m.text or "" for m in request.messages)),
        ),
        output_tokens=usage_raw.get(
            "completion_tokens", estimate_tokens(choice.get("content") or "")
        ),
    )
    raw_calls = choice.get("tool_calls")
    if raw_calls:
        calls = tuple(
            ToolCall(
                id=c.get("id") or f"call-{uuid.uuid4().hex[:8]}",
                tool_name=c["function"]["name"],
                arguments_json=c["function"].get("arguments", "{}"),
            )
            for c in raw_calls
        )
        return ChatResponse(kind="tool_calls", tool_calls=calls, usage=usage)
    text = choice.get("content")
    if text is None:
        raise MalformedResponseError("response carries neither text nor tool calls")
    return ChatResponse(kind="text", text=text, usage=usage)


class BudgetDecision(FrozenWireModel):
    allowed: bool
    remaining: int


@dataclass
class UsageLedger:
    """Per-user daily token accounting; BYOK users bypass the limit.

    check_and_record is an atomic reserve: the cumulative count is only
    advanced when the request fits, so concurrent callers can never push a
    non-BYOK user past the limit.
    """

    daily_limit: int = DEFAULT_DAILY_LIMIT
    byok_users: set[str] = field(default_factory=set)
    _used: dict[tuple[str, str], int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @staticmethod
    def _today() -> str:
        return datetime.now(timezone.utc).strftime("%Y-%m-%d")

    def used_today(self, user_id: str) -> int:
        with self._lock:
            return self._used.get((user_id, self._today()), 0)

    def check_and_record(
        self, user_id: str, tokens: int, byok: bool = False
    ) -> BudgetDecision:
        if tokens < 0:
            raise ContractViolation("tokens must be >= 0")
        if byok or user_id in self.byok_users:
            return BudgetDecision(allowed=True, remaining=UNLIMITED)
        key = (user_id, self._today())
        with self._lock:
            used = self._used.get(key, 0)
            if used + tokens > self.daily_limit:
                return BudgetDecision(allowed=False, remaining=self.daily_limit - used)
            self._used[key] = used + tokens
            return BudgetDecision(
                allowed=True, remaining=self.daily_limit - self._used[key]
            )


class Gateway:
    """Routes completion requests to the provider named by the model ref."""

    def __init__(self, providers: dict[str, Provider]):
        self._providers = providers

    def complete(
        self,
        model_ref: ModelRef,
        request: ChatRequest,
        credentials: Credentials = Credentials(),
    ) -> ChatResponse:
        _check_request(request)
        provider = self._providers.get(model_ref.provider_id)
        if provider is None:
            raise ContractViolation(f"no provider registered for {model_ref.provider_id!r}")
        response = provider.complete(model_ref, request, credentials)
        if response.kind == "text" and response.text is None:
            raise MalformedResponseError("text response without text")
        if response.kind == "tool_calls" and not response.tool_calls:
            raise MalformedResponseError("tool_calls response without calls")
        return response
