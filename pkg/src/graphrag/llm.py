"""Single point of LLM access: remote chat completions or scripted replays.

Every prompt travels as a ChatRequest carrying a registered template tag.
The scripted client maps (tag, digest of the whitespace-normalized prompt)
to canned responses, which makes pipelines replayable byte-for-byte without
a provider. Structured outputs (code fences, JSON objects) are extracted and
validated by ``parse_structured``.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    MalformedStructuredOutputError,
    ProviderUnavailableError,
    ResponseTooLongError,
    ScriptMissError,
)

TEMPLATE_TAGS = (
    "node_extraction",
    "relationship_selection",
    "text2cypher",
    "answer",
    "judge",
    "intent",
    "predicate_text",
    "predicate_category",
)


@dataclass
class ChatRequest:
    system: str
    user: str
    tag: str
    temperature: float = 0.0
    max_tokens: int = 2048

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        if self.tag not in TEMPLATE_TAGS:
            raise ValueError(f"unregistered template tag {self.tag!r}")


def prompt_digest(system: str, user: str) -> str:
    """Hash of the whitespace-normalized prompt, so cosmetic template edits
    do not invalidate scripts."""
    normalized = " ".join(f"{system}\n{user}".split())
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:16]


@dataclass
class ScriptedResponses:
    responses: dict[str, dict[str, str]] = field(default_factory=dict)
    defaults: dict[str, str] = field(default_factory=dict)

    def put(self, tag: str, digest: str, response: str) -> None:
        self.responses.setdefault(tag, {})[digest] = response

    def to_json(self) -> str:
        return json.dumps(
            {"responses": self.responses, "defaults": self.defaults},
            indent=2,
            ensure_ascii=False,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ScriptedResponses":
        data = json.loads(text)
        return cls(responses=data.get("responses", {}), defaults=data.get("defaults", {}))

    @classmethod
    def load(cls, path: str | Path) -> "ScriptedResponses":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


class ScriptedClient:
    """Pure replay client: (tag, digest) fully determines the output."""

    def __init__(self, script: ScriptedResponses):
        self.script = script

    def complete(self, request: ChatRequest) -> str:
        digest = prompt_digest(request.system, request.user)
        by_tag = self.script.responses.get(request.tag, {})
        if digest in by_tag:
            return by_tag[digest]
        if request.tag in self.script.defaults:
            return self.script.defaults[request.tag]
        raise ScriptMissError(request.tag, digest)


class RemoteClient:
    """OpenAI-compatible /v1/chat/completions client with bounded retry.

    Endpoint, key, and model come from GRAPHRAG_LLM_URL / GRAPHRAG_LLM_KEY /
    GRAPHRAG_LLM_MODEL unless passed explicitly.
    """

    def __init__(self, url: str | None = None, api_key: str | None = None,
                 model: str | None = None, max_attempts: int = 3):
        self.url = url or os.environ.get("GRAPHRAG_LLM_URL")
        self.api_key = api_key or os.environ.get("GRAPHRAG_LLM_KEY", "")
        self.model = model or os.environ.get("GRAPHRAG_LLM_MODEL", "")
        self.max_attempts = max_attempts
        if not self.url:
            raise ProviderUnavailableError("no LLM endpoint configured")

    def complete(self, request: ChatRequest) -> str:
        import requests

        payload = {
            "model": self.model,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            try:
                resp = requests.post(
                    self.url,
                    json=payload,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                    timeout=120,
                )
                resp.raise_for_status()
                data = resp.json()
                choice = data["choices"][0]
                if choice.get("finish_reason") == "length":
                    raise ResponseTooLongError("completion hit max_tokens")
                return choice["message"]["content"]
            except ResponseTooLongError:
                raise
            except Exception as exc:  # noqa: BLE001
                last_error = exc
                time.sleep(min(2.0 ** attempt * 0.2, 2.0))
        raise ProviderUnavailableError(str(last_error))


def complete(request: ChatRequest, client) -> str:
    return client.complete(request)


_FENCE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)
_CYPHER_START = re.compile(r"^\s*(MATCH|MERGE|UNWIND)\b", re.IGNORECASE)

SCHEMA_DESCRIPTORS = ("cypher-block", "fund-mentions", "relationship-list", "judgment", "intent")


def _first_json_object(text: str):
    decoder = json.JSONDecoder()
    for start, ch in enumerate(text):
        if ch in "{[":
            try:
                value, _ = decoder.raw_decode(text[start:])
                return value
            except json.JSONDecodeError:
                continue
    raise MalformedStructuredOutputError("no JSON value found")


def parse_structured(response: str, expected: str):
    """Extract and validate the structured part of a model response."""
    if expected not in SCHEMA_DESCRIPTORS:
        raise ValueError(f"unregistered schema descriptor {expected!r}")

    if expected == "cypher-block":
        fence = _FENCE.search(response)
        if fence:
            text = fence.group(1).strip()
            if not text:
                raise MalformedStructuredOutputError("empty code block")
            return text
        if _CYPHER_START.match(response):
            return response.strip()
        raise MalformedStructuredOutputError("no code block or query text")

    if expected == "fund-mentions":
        body = response
        fence = _FENCE.search(response)
        if fence:
            body = fence.group(1)
        value = _first_json_object(body)
        if not isinstance(value, dict):
            raise MalformedStructuredOutputError("fund-mentions is not an object")
        out = {}
        for key in ("funds", "fund_types", "asset_classes"):
            items = value.get(key, [])
            if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
                raise MalformedStructuredOutputError(f"{key} must be a list of strings")
            out[key] = items
        return out

    if expected == "relationship-list":
        body = response
        fence = _FENCE.search(response)
        if fence:
            body = fence.group(1)
        value = _first_json_object(body)
        if isinstance(value, dict):
            value = value.get("relationships", None)
        if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
            raise MalformedStructuredOutputError("expected a JSON array of predicate strings")
        return value

    if expected == "judgment":
        lowered = response.lower()
        hits = [tok for tok in ("incorrect", "partial", "correct") if tok in lowered]
        if not hits:
            raise MalformedStructuredOutputError("no judgment token")
        # "incorrect" contains "correct", so earliest match position decides
        return min(hits, key=lambda tok: lowered.index(tok))

    lowered = response.strip().lower()
    for intent in ("compare", "detail", "search", "other"):
        if intent in lowered:
            return intent
    raise MalformedStructuredOutputError("no intent token")
