"""Anchored snippet injection with exact inverse patches.

Anchors are literal-line matchers (trailing whitespace ignored on both
sides of the comparison); insertion is whole-lines-only, so the inverse of
every application is a span deletion. All operations are pure functions
over a workspace value.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import (
    BatchFailed,
    EngineError,
    FileExists,
    FileMissing,
    LineOutOfRange,
    MatchNotFound,
    StaleInverse,
)
from .workspace import Workspace, file_digest, is_safe_relpath, normalize_text


class AnchorKind(str, Enum):
    FILE_START = "file_start"
    FILE_END = "file_end"
    AFTER_MATCH = "after_match"
    BEFORE_MATCH = "before_match"
    AT_LINE = "at_line"
    CREATE_FILE = "create_file"


@dataclass(frozen=True)
class Anchor:
    kind: AnchorKind
    file: str
    match: Optional[str] = None
    line: Optional[int] = None
    occurrence: int = 1

    def __post_init__(self):
        needs_match = self.kind in (AnchorKind.AFTER_MATCH, AnchorKind.BEFORE_MATCH)
        if needs_match != (self.match is not None):
            raise ValueError(f"match must be present iff kind is {self.kind.value}")
        needs_line = self.kind is AnchorKind.AT_LINE
        if needs_line != (self.line is not None):
            raise ValueError("line must be present iff kind is at_line")
        if not is_safe_relpath(self.file):
            raise ValueError(f"unsafe workspace path: {self.file!r}")
        if self.occurrence < 1:
            raise ValueError("occurrence is 1-based")

    def to_doc(self) -> dict:
        doc: dict = {"kind": self.kind.value, "file": self.file}
        if self.match is not None:
            doc["match"] = self.match
        if self.line is not None:
            doc["line"] = self.line
        if self.occurrence != 1:
            doc["occurrence"] = self.occurrence
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "Anchor":
        return cls(
            kind=AnchorKind(doc["kind"]),
            file=doc["file"],
            match=doc.get("match"),
            line=doc.get("line"),
            occurrence=doc.get("occurrence", 1),
        )


@dataclass(frozen=True)
class Snippet:
    id: str
    anchor: Anchor
    content: str
    rationale: str = ""

    def __post_init__(self):
        if not self.content and self.anchor.kind is not AnchorKind.CREATE_FILE:
            raise ValueError("snippet content must be non-empty")

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "rationale": self.rationale,
            "anchor": self.anchor.to_doc(),
            "content": self.content,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Snippet":
        return cls(
            id=doc["id"],
            anchor=Anchor.from_doc(doc["anchor"]),
            content=doc["content"],
            rationale=doc.get("rationale", ""),
        )


@dataclass(frozen=True)
class InversePatch:
    """Span deletion restoring the pre-application bytes of one file."""

    file: str
    delete_file: bool  # CreateFile inverse removes the file entirely
    start: int = 0  # 0-based first line of the inserted span
    count: int = 0
    pre_digest: str = ""
    post_digest: str = ""

    def to_doc(self) -> dict:
        return {
            "file": self.file,
            "delete_file": self.delete_file,
            "start": self.start,
            "count": self.count,
            "pre_digest": self.pre_digest,
            "post_digest": self.post_digest,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "InversePatch":
        return cls(**doc)


@dataclass(frozen=True)
class InjectionResult:
    snippet_id: str
    file: str
    inserted_span: tuple[int, int]  # (1-based start line, line count)
    inverse: InversePatch

    def to_doc(self) -> dict:
        return {
            "snippet_id": self.snippet_id,
            "file": self.file,
            "inserted_span": list(self.inserted_span),
            "inverse": self.inverse.to_doc(),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "InjectionResult":
        return cls(
            snippet_id=doc["snippet_id"],
            file=doc["file"],
            inserted_span=tuple(doc["inserted_span"]),
            inverse=InversePatch.from_doc(doc["inverse"]),
        )


def _match_line(candidate: str, wanted: str) -> bool:
    # trailing whitespace insignificant, leading whitespace significant
    return candidate.rstrip() == wanted.rstrip()


def resolve_anchor(files: Workspace, anchor: Anchor) -> int:
    """Resolve an anchor to a 0-based insertion index into the file's lines.

    Index i means "insert before line i+1". CreateFile resolves to 0 and
    requires the path to be absent.
    """
    if anchor.kind is AnchorKind.CREATE_FILE:
        if anchor.file in files:
            raise FileExists(anchor.file)
        return 0
    if anchor.file not in files:
        raise FileMissing(anchor.file)
    lines = files[anchor.file].splitlines()
    if anchor.kind is AnchorKind.FILE_START:
        return 0
    if anchor.kind is AnchorKind.FILE_END:
        return len(lines)
    if anchor.kind is AnchorKind.AT_LINE:
        if not 1 <= anchor.line <= len(lines) + 1:
            raise LineOutOfRange(f"{anchor.file}:{anchor.line} (file has {len(lines)} lines)")
        return anchor.line - 1
    # AfterMatch / BeforeMatch
    seen = 0
    for i, line in enumerate(lines):
        if _match_line(line, anchor.match):
            seen += 1
            if seen == anchor.occurrence:
                return i + 1 if anchor.kind is AnchorKind.AFTER_MATCH else i
    raise MatchNotFound(
        f"{anchor.file}: occurrence {anchor.occurrence} of {anchor.match!r} "
        f"({seen} found)"
    )


def apply_snippet(files: Workspace, snippet: Snippet) -> tuple[Workspace, InjectionResult]:
    """Insert a snippet's content as whole lines at its resolved anchor."""
    index = resolve_anchor(files, snippet.anchor)
    path = snippet.anchor.file
    content = normalize_text(snippet.content)
    new_lines = content.splitlines(keepends=True)

    if snippet.anchor.kind is AnchorKind.CREATE_FILE:
        pre_existed = False
        old_text = ""
    else:
        pre_existed = True
        old_text = files[path]

    old_lines = old_text.splitlines(keepends=True)
    merged = old_lines[:index] + new_lines + old_lines[index:]
    new_text = "".join(merged)

    result = InjectionResult(
        snippet_id=snippet.id,
        file=path,
        inserted_span=(index + 1, len(new_lines)),
        inverse=InversePatch(
            file=path,
            delete_file=not pre_existed,
            start=index,
            count=len(new_lines),
            pre_digest=file_digest(old_text),
            post_digest=file_digest(new_text),
        ),
    )
    updated = dict(files)
    updated[path] = new_text
    return updated, result


def apply_batch(
    files: Workspace, snippets: Sequence[Snippet]
) -> tuple[Workspace, list[InjectionResult]]:
    """Apply snippets in order; all-or-nothing.

    Each snippet resolves against the workspace produced by the previous
    applications. On failure, BatchFailed carries the 1-based position of
    the failing snippet and the original workspace value is untouched.
    """
    current = files
    results: list[InjectionResult] = []
    for i, snippet in enumerate(snippets):
        try:
            current, result = apply_snippet(current, snippet)
        except EngineError as err:
            raise BatchFailed(i + 1, err) from err
        results.append(result)
    return current, results


def revert(files: Workspace, results: Sequence[InjectionResult]) -> Workspace:
    """Undo a batch by applying inverses in reverse order.

    StaleInverse if any target file no longer matches the digest recorded
    at application time.
    """
    current = dict(files)
    for result in reversed(results):
        inv = result.inverse
        if inv.file not in current:
            raise StaleInverse(f"{inv.file} missing")
        text = current[inv.file]
        if file_digest(text) != inv.post_digest:
            raise StaleInverse(f"{inv.file} changed since application")
        if inv.delete_file:
            del current[inv.file]
            continue
        lines = text.splitlines(keepends=True)
        restored = "".join(lines[: inv.start] + lines[inv.start + inv.count :])
        if file_digest(restored) != inv.pre_digest:
            raise StaleInverse(f"{inv.file}: inverse does not reproduce pre-image")
        current[inv.file] = restored
    return current
