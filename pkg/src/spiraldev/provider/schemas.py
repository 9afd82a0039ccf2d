"""Response schema validation for generation backends.

Nothing outside the provider package ever parses raw model output; every
downstream consumer receives payloads that passed validate_response.
"""

from __future__ import annotations

from typing import Any

from ..errors import SchemaViolation
from ..injection import AnchorKind
from ..workspace import is_safe_relpath

KINDS = ("spec", "data", "plan", "snippets", "redo")

_ANCHOR_KINDS = {k.value for k in AnchorKind}


def _require(doc: Any, path: str) -> None:
    if not isinstance(doc, dict):
        raise SchemaViolation(path, f"expected object, got {type(doc).__name__}")


def _str_field(doc: dict, key: str, path: str, nonempty: bool = True) -> str:
    if key not in doc:
        raise SchemaViolation(f"{path}.{key}" if path else key, "missing")
    value = doc[key]
    if not isinstance(value, str):
        raise SchemaViolation(f"{path}.{key}" if path else key, "expected string")
    if nonempty and not value.strip():
        raise SchemaViolation(f"{path}.{key}" if path else key, "non-empty")
    return value


def validate_anchor(doc: Any, path: str) -> dict:
    _require(doc, path)
    kind = _str_field(doc, "kind", path)
    if kind not in _ANCHOR_KINDS:
        raise SchemaViolation(f"{path}.kind", f"unknown anchor kind {kind!r}")
    file = _str_field(doc, "file", path)
    if not is_safe_relpath(file):
        raise SchemaViolation(f"{path}.file", "must be a relative path without traversal")
    needs_match = kind in ("after_match", "before_match")
    if needs_match:
        if "match" not in doc or not isinstance(doc["match"], str) or not doc["match"].strip():
            raise SchemaViolation(f"{path}.match", f"required for {kind}")
    elif "match" in doc:
        raise SchemaViolation(f"{path}.match", f"not allowed for {kind}")
    if kind == "at_line":
        if "line" not in doc or not isinstance(doc["line"], int) or doc["line"] < 1:
            raise SchemaViolation(f"{path}.line", "required 1-based integer for at_line")
    elif "line" in doc:
        raise SchemaViolation(f"{path}.line", f"not allowed for {kind}")
    if "occurrence" in doc and (
        not isinstance(doc["occurrence"], int) or doc["occurrence"] < 1
    ):
        raise SchemaViolation(f"{path}.occurrence", "must be an integer >= 1")
    return doc


def validate_snippet(doc: Any, path: str) -> dict:
    _require(doc, path)
    _str_field(doc, "id", path)
    if "rationale" in doc and not isinstance(doc["rationale"], str):
        raise SchemaViolation(f"{path}.rationale", "expected string")
    if "anchor" not in doc:
        raise SchemaViolation(f"{path}.anchor", "missing")
    anchor = validate_anchor(doc["anchor"], f"{path}.anchor")
    if "content" not in doc or not isinstance(doc["content"], str):
        raise SchemaViolation(f"{path}.content", "missing or not a string")
    if not doc["content"] and anchor["kind"] != "create_file":
        raise SchemaViolation(f"{path}.content", "non-empty except for create_file")
    return doc


def validate_response(kind: str, raw: Any) -> dict:
    """Validate a raw response document for the given request kind.

    Returns the document unchanged on success; raises SchemaViolation
    naming the first violated field otherwise.
    """
    if kind not in KINDS:
        raise SchemaViolation("kind", f"unknown request kind {kind!r}")
    _require(raw, "")
    if kind == "spec":
        _str_field(raw, "specification", "")
        return raw
    if kind == "data":
        records = raw.get("records")
        if records is None:
            raise SchemaViolation("records", "missing")
        if not isinstance(records, list) or not records:
            raise SchemaViolation("records", "non-empty list required")
        for i, record in enumerate(records):
            if not isinstance(record, dict):
                raise SchemaViolation(f"records[{i}]", "expected object")
        return raw
    if kind == "plan":
        tasks = raw.get("tasks")
        if tasks is None:
            raise SchemaViolation("tasks", "missing")
        if not isinstance(tasks, list) or not tasks:
            raise SchemaViolation("tasks", "non-empty")
        for i, task in enumerate(tasks):
            _require(task, f"tasks[{i}]")
            _str_field(task, "title", f"tasks[{i}]")
            _str_field(task, "description", f"tasks[{i}]", nonempty=False)
        return raw
    # snippets / redo
    snippets = raw.get("snippets")
    if snippets is None:
        raise SchemaViolation("snippets", "missing")
    if not isinstance(snippets, list) or not snippets:
        raise SchemaViolation("snippets", "non-empty")
    for i, snippet in enumerate(snippets):
        validate_snippet(snippet, f"snippets[{i}]")
    return raw
