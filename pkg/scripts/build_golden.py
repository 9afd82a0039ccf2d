#!/usr/bin/env python3
"""Compute the golden workspaces for the walkthrough scenario with a naive,
engine-independent applier, and freeze them under tests/data/golden/.

The applier here deliberately reimplements anchor resolution and insertion
with plain string offsets so the frozen expectation does not depend on the
engine under test.
"""

import hashlib
import json
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def normalize(content: str) -> str:
    content = content.replace("\r\n", "\n").replace("\r", "\n")
    if content and not content.endswith("\n"):
        content += "\n"
    return content


def line_offset(text: str, line_index: int) -> int:
    """Byte offset where the 0-based line line_index starts."""
    offset = 0
    for _ in range(line_index):
        offset = text.index("\n", offset) + 1
    return offset


def find_match_line(text: str, match: str, occurrence: int) -> int:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    seen = 0
    for i, line in enumerate(lines):
        if line.rstrip() == match.rstrip():
            seen += 1
            if seen == occurrence:
                return i
    raise AssertionError(f"match not found: {match!r}")


def apply_snippet(files: dict, snippet: dict) -> None:
    anchor = snippet["anchor"]
    kind = anchor["kind"]
    path = anchor["file"]
    content = normalize(snippet["content"])
    if kind == "create_file":
        assert path not in files, path
        files[path] = content
        return
    text = files[path]
    line_count = text.count("\n")
    occurrence = anchor.get("occurrence", 1)
    if kind == "file_start":
        index = 0
    elif kind == "file_end":
        index = line_count
    elif kind == "at_line":
        index = anchor["line"] - 1
    elif kind == "after_match":
        index = find_match_line(text, anchor["match"], occurrence) + 1
    elif kind == "before_match":
        index = find_match_line(text, anchor["match"], occurrence)
    else:
        raise AssertionError(kind)
    offset = line_offset(text, index)
    files[path] = text[:offset] + content + text[offset:]


def workspace_digest(files: dict) -> str:
    h = hashlib.sha256()
    for path in sorted(files):
        file_hash = hashlib.sha256(files[path].encode("utf-8")).hexdigest()
        h.update(path.encode("utf-8") + b"\0" + file_hash.encode("ascii") + b"\n")
    return h.hexdigest()


def write_tree(files: dict, target: Path) -> None:
    if target.exists():
        shutil.rmtree(target)
    for path, content in files.items():
        dest = target / path
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(content, encoding="utf-8", newline="")


def main() -> None:
    fixture = json.loads((ROOT / "fixtures" / "walkthrough.json").read_text("utf-8"))
    exchanges = fixture["exchanges"]
    records = exchanges[1]["response"]["records"]

    files: dict = {}
    files["data.json"] = json.dumps(records, indent=2) + "\n"

    snapshots = {}
    snippet_batches = [e for e in exchanges if e["kind"] == "snippets"]
    assert len(snippet_batches) == 8

    # tasks 1-7: apply each batch and snapshot it
    for task_number, batch in enumerate(snippet_batches[:7], start=1):
        for snippet in batch["response"]["snippets"]:
            apply_snippet(files, snippet)
        snapshots[task_number] = dict(files)

    # rollback to the task-6 snapshot, then the replacement visited task
    files = dict(snapshots[6])
    for snippet in snippet_batches[7]["response"]["snippets"]:
        apply_snippet(files, snippet)

    golden = ROOT / "tests" / "data" / "golden"
    write_tree(snapshots[6], golden / "snapshot6")
    write_tree(files, golden / "final")
    digests = {
        "snapshot6": workspace_digest(snapshots[6]),
        "final": workspace_digest(files),
        "per_task": {str(k): workspace_digest(v) for k, v in snapshots.items()},
    }
    (golden / "digests.json").write_text(json.dumps(digests, indent=2) + "\n", "utf-8")
    print(json.dumps(digests, indent=2))


if __name__ == "__main__":
    main()
