"""In-memory workspace values and content digests.

A workspace is a plain mapping of relative file path -> text content.
All mutating machinery treats workspaces as immutable values and returns
fresh dicts, which is what makes batch atomicity and error-implies-no-op
trivial to guarantee.

Text is normalized to LF line endings on ingest, and every non-empty file
is kept newline-terminated so line-oriented insertion and inverse patches
stay well formed.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path, PurePosixPath

Workspace = dict[str, str]

DIGEST_ALGORITHM = "sha256"


def normalize_text(text: str) -> str:
    """Normalize line endings to LF and guarantee a trailing newline."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if text and not text.endswith("\n"):
        text += "\n"
    return text


def is_safe_relpath(path: str) -> bool:
    """Workspace paths are relative, slash-separated, no traversal."""
    if not path or path.startswith("/") or path.startswith("\\"):
        return False
    parts = PurePosixPath(path).parts
    return all(part not in ("..", ".") for part in parts) and "\\" not in path


def file_digest(content: str) -> str:
    return hashlib.sha256(content.encode("utf-8")).hexdigest()


def workspace_digest(files: Workspace) -> str:
    """Hex digest over the sorted (path, content-digest) listing."""
    h = hashlib.sha256()
    for path in sorted(files):
        h.update(path.encode("utf-8"))
        h.update(b"\0")
        h.update(file_digest(files[path]).encode("ascii"))
        h.update(b"\n")
    return h.hexdigest()


def flush_workspace(files: Workspace, root: Path) -> None:
    """Mirror the workspace value onto disk, removing stragglers."""
    root.mkdir(parents=True, exist_ok=True)
    keep = set()
    for path, content in files.items():
        target = root / path
        keep.add(target.resolve())
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8", newline="")
    for existing in sorted(root.rglob("*"), reverse=True):
        if existing.is_file() and existing.resolve() not in keep:
            existing.unlink()
        elif existing.is_dir() and not any(existing.iterdir()):
            existing.rmdir()


def load_workspace(root: Path) -> Workspace:
    files: Workspace = {}
    if not root.is_dir():
        return files
    for path in root.rglob("*"):
        if path.is_file():
            rel = path.relative_to(root).as_posix()
            files[rel] = path.read_text(encoding="utf-8")
    return files


def numbered_listing(files: Workspace, byte_budget: int = 64 * 1024) -> str:
    """Per-file line-numbered listing, truncating largest files first.

    This is the workspace summary sent to generation providers; anchors
    require the model to see real line text, so lines are verbatim.
    """
    sections: dict[str, str] = {}
    for path in sorted(files):
        lines = files[path].splitlines()
        body = "\n".join(f"{i + 1:4d} | {line}" for i, line in enumerate(lines))
        sections[path] = f"=== {path} ===\n{body}\n"

    def total() -> int:
        return sum(len(s.encode("utf-8")) for s in sections.values())

    while total() > byte_budget and sections:
        largest = max(sections, key=lambda p: len(sections[p]))
        head = sections[largest].splitlines()
        if len(head) <= 4:
            sections[largest] = f"=== {largest} ===\n[elided]\n"
            if total() > byte_budget and len(sections) == 1:
                break
            continue
        sections[largest] = "\n".join(head[: len(head) // 2]) + "\n[elided]\n"
    return "\n".join(sections[p] for p in sorted(sections))


def fsync_dir(path: Path) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)
