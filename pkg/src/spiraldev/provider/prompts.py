"""Prompt construction for the live backend.

One versioned template per request kind, shipped as text assets next to
this module. Rendering is a pure function of the request, so transcripts
are stable across runs for a given template version.
"""

from __future__ import annotations

import json
from importlib import resources
from string import Template

from . import GenerationRequest

TEMPLATE_VERSION = 1


def _load(name: str) -> Template:
    text = (
        resources.files("spiraldev.templates").joinpath(f"{name}.txt").read_text("utf-8")
    )
    return Template(text)


def render_prompt(request: GenerationRequest) -> str:
    template = _load(request.kind)
    context = dict(request.context)
    if "task" in context:
        task = context.pop("task")
        context["task_title"] = task.get("title", "")
        context["task_description"] = task.get("description", "")
    if "dataset" in context:
        context["dataset"] = json.dumps(context["dataset"], indent=2)
    if "previous_snippets" in context:
        context["previous_snippets"] = json.dumps(context["previous_snippets"], indent=2)
    context.setdefault("feedback", "")
    return template.safe_substitute(context)
