"""Generation backends: scripted fixtures, recorded replay, and live HTTP.

A provider turns a GenerationRequest into a schema-valid response. Schema
failures are retried (re-prompting with the diagnostic for the live
backend, replaying the canned document for the scripted one) up to
``retries`` times before SchemaInvalidAfterRetries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..errors import (
    FixtureExhausted,
    FixtureMismatch,
    SchemaInvalidAfterRetries,
    SchemaViolation,
)
from .schemas import KINDS, validate_response

#: context keys each request kind requires / additionally allows
REQUIRED_CONTEXT = {
    "spec": {"goal"},
    "data": {"goal", "specification"},
    "plan": {"goal", "specification"},
    "snippets": {"goal", "specification", "task", "workspace"},
    "redo": {"goal", "specification", "task", "workspace", "feedback"},
}
OPTIONAL_CONTEXT = {
    "spec": {"feedback"},
    "data": {"feedback"},
    "plan": {"feedback"},
    "snippets": set(),
    "redo": {"previous_snippets"},
}


@dataclass(frozen=True)
class GenerationRequest:
    kind: str
    context: dict[str, Any]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown request kind {self.kind!r}")
        required = REQUIRED_CONTEXT[self.kind]
        allowed = required | OPTIONAL_CONTEXT[self.kind]
        keys = set(self.context)
        if not required <= keys:
            raise ValueError(f"{self.kind} request missing {sorted(required - keys)}")
        if not keys <= allowed:
            raise ValueError(f"{self.kind} request has stray keys {sorted(keys - allowed)}")

    def canonical(self) -> str:
        """Stable serialization used for fixture matching and transcripts."""
        return json.dumps(
            {"kind": self.kind, "context": self.context}, sort_keys=True, default=str
        )


@dataclass(frozen=True)
class GenerationResponse:
    kind: str
    payload: dict


class Provider:
    """Base: validation + retry loop shared by all backends."""

    retries = 2

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        diagnostic: Optional[str] = None
        last: Optional[SchemaViolation] = None
        for _ in range(self.retries + 1):
            raw = self._raw_generate(request, diagnostic)
            try:
                payload = validate_response(request.kind, raw)
            except SchemaViolation as err:
                last = err
                diagnostic = str(err)
                continue
            return GenerationResponse(request.kind, payload)
        raise SchemaInvalidAfterRetries(last)

    def _raw_generate(self, request: GenerationRequest, diagnostic: Optional[str]) -> Any:
        raise NotImplementedError


@dataclass
class ScriptedProvider(Provider):
    """Deterministic backend replaying an ordered fixture of exchanges.

    Fixture document: {"exchanges": [{"kind": ..., "match": substring?,
    "response": document}, ...]}. Exchanges are consumed strictly in
    order; a request whose kind or match key disagrees with the next
    exchange is FixtureMismatch.
    """

    exchanges: list[dict]
    cursor: int = 0
    _pending: Optional[dict] = field(default=None, repr=False)

    @classmethod
    def from_file(cls, path: Path) -> "ScriptedProvider":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(exchanges=list(doc["exchanges"]))

    def _raw_generate(self, request: GenerationRequest, diagnostic: Optional[str]) -> Any:
        if diagnostic is not None and self._pending is not None:
            # schema retry replays the same canned document
            return self._pending["response"]
        if self.cursor >= len(self.exchanges):
            raise FixtureExhausted(f"no exchange left for {request.kind} request")
        exchange = self.exchanges[self.cursor]
        if exchange.get("kind") != request.kind:
            raise FixtureMismatch(
                f"expected {exchange.get('kind')!r} request, got {request.kind!r} "
                f"at exchange {self.cursor + 1}"
            )
        key = exchange.get("match")
        if key and key not in request.canonical():
            raise FixtureMismatch(
                f"exchange {self.cursor + 1} key {key!r} absent from request"
            )
        self.cursor += 1
        self._pending = exchange
        return exchange["response"]


@dataclass
class ReplayProvider(Provider):
    """Backend serving previously recorded response payloads in order.

    Used when rebuilding a session from its event log, where every
    provider exchange was captured in the event payload.
    """

    recorded: list[dict]
    cursor: int = 0

    def _raw_generate(self, request: GenerationRequest, diagnostic: Optional[str]) -> Any:
        if self.cursor >= len(self.recorded):
            raise FixtureExhausted("recorded exchanges exhausted")
        doc = self.recorded[self.cursor]
        self.cursor += 1
        return doc


class RecordingProvider(Provider):
    """Wrapper capturing the validated payload of every exchange."""

    def __init__(self, inner: Provider):
        self.inner = inner
        self.captured: list[dict] = []

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        response = self.inner.generate(request)
        self.captured.append(response.payload)
        return response
