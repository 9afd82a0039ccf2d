"""Live chat-completions backend.

Speaks a generic chat-completions wire protocol: POST {url} with
{model, messages}, answer in choices[0].message.content. Endpoint, token,
and model come from config or the PROVIDER_URL / PROVIDER_API_KEY /
PROVIDER_MODEL environment variables. No vendor assumptions.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Optional

import httpx

from ..errors import TransportError
from . import GenerationRequest, Provider
from .prompts import render_prompt

TRANSPORT_ATTEMPTS = 3
BACKOFF_BASE_SECONDS = 1.0


@dataclass
class LiveProviderConfig:
    url: str = ""
    api_key: str = ""
    model: str = ""
    timeout: float = 120.0

    @classmethod
    def from_env(cls, base: Optional["LiveProviderConfig"] = None) -> "LiveProviderConfig":
        base = base or cls()
        return cls(
            url=os.environ.get("PROVIDER_URL", base.url),
            api_key=os.environ.get("PROVIDER_API_KEY", base.api_key),
            model=os.environ.get("PROVIDER_MODEL", base.model),
            timeout=base.timeout,
        )


@dataclass
class LiveProvider(Provider):
    config: LiveProviderConfig
    #: set to abandon an in-flight generation between attempts
    cancel: threading.Event = field(default_factory=threading.Event)

    def _raw_generate(self, request: GenerationRequest, diagnostic: Optional[str]) -> Any:
        prompt = render_prompt(request)
        if diagnostic is not None:
            prompt += (
                "\n\nYour previous answer failed validation: "
                f"{diagnostic}\nReturn a corrected JSON object."
            )
        content = self._chat(prompt)
        try:
            return json.loads(content)
        except json.JSONDecodeError:
            # hand a non-JSON body to the validator as-is; it will produce
            # the diagnostic that drives the re-prompt
            return content

    def _chat(self, prompt: str) -> str:
        if not self.config.url:
            raise TransportError("no provider URL configured (PROVIDER_URL)")
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        last: Optional[Exception] = None
        for attempt in range(TRANSPORT_ATTEMPTS):
            if self.cancel.is_set():
                raise TransportError("generation canceled")
            try:
                response = httpx.post(
                    self.config.url, json=body, headers=headers, timeout=self.config.timeout
                )
                response.raise_for_status()
                doc = response.json()
                return doc["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as err:
                last = err
                if attempt < TRANSPORT_ATTEMPTS - 1:
                    time.sleep(BACKOFF_BASE_SECONDS * 2**attempt)
        raise TransportError(str(last))
