import json
import random
import string
from pathlib import Path

import pytest

from spiraldev.orchestrator import Engine
from spiraldev.provider import ScriptedProvider

REPO = Path(__file__).resolve().parents[1]
WALKTHROUGH = REPO / "fixtures" / "walkthrough.json"
GOLDEN_DIR = REPO / "tests" / "data" / "golden"

GOAL = (
    "Visualize Yelp restaurants as a card-swiping UI to help users choose "
    "where to eat"
)

#: the full walkthrough as (verb, args) pairs; task ids are deterministic
WALKTHROUGH_STEPS = (
    [
        ("start_session", {"goal": GOAL}),
        ("review_spec", {"action": "approve"}),
        ("review_plan", {"action": "approve"}),
    ]
    + [
        step
        for i in range(1, 6)
        for step in [
            ("run_task", {"task_id": f"t{i}"}),
            ("resolve_task", {"action": "approve"}),
        ]
    ]
    + [
        ("add_task", {"title": "Implement search in the bookmarks tab",
                      "description": "Filter the bookmark list as the user types."}),
        ("run_task", {"task_id": "t6"}),
        ("resolve_task", {"action": "approve"}),
        ("add_task", {"title": "Mark bookmarked restaurants as visited",
                      "description": "Visited toggle on each bookmark entry."}),
        ("run_task", {"task_id": "t7"}),
        ("resolve_task", {"action": "approve"}),
        ("rollback_to", {"snapshot_id": 6, "confirm": True}),
        ("add_task", {"title": "Mark any restaurant as visited",
                      "description": "Visited toggle on every card plus a visited panel."}),
        ("run_task", {"task_id": "t8"}),
        ("resolve_task", {"action": "approve"}),
    ]
)


@pytest.fixture(scope="session")
def golden_digests() -> dict:
    return json.loads((GOLDEN_DIR / "digests.json").read_text(encoding="utf-8"))


def walkthrough_provider() -> ScriptedProvider:
    return ScriptedProvider.from_file(WALKTHROUGH)


def run_walkthrough(engine: Engine, steps=WALKTHROUGH_STEPS) -> Engine:
    for verb, args in steps:
        engine.execute(verb, args)
    return engine


@pytest.fixture
def walkthrough_engine() -> Engine:
    return run_walkthrough(Engine(provider=walkthrough_provider()))


# --- randomized workspace / snippet generation (seeded, deterministic) ---

_NAME_CHARS = string.ascii_lowercase
_LINE_CHARS = string.ascii_letters + string.digits + " _-<>/=.\"'{}();"


def random_line(rng: random.Random) -> str:
    return "".join(rng.choice(_LINE_CHARS) for _ in range(rng.randint(0, 40)))


def random_content(rng: random.Random, min_lines=1, max_lines=8) -> str:
    count = rng.randint(min_lines, max_lines)
    return "".join(random_line(rng) + "\n" for _ in range(count))


def random_workspace(rng: random.Random, max_files=4) -> dict:
    files = {}
    for _ in range(rng.randint(1, max_files)):
        name = "".join(rng.choice(_NAME_CHARS) for _ in range(6)) + rng.choice(
            [".html", ".css", ".js", ".txt"]
        )
        empty = rng.random() < 0.1
        files[name] = "" if empty else random_content(rng, 0, 12)
    return files


def random_valid_snippet(rng: random.Random, files: dict, sid: str = "s"):
    """A snippet whose anchor resolves against the given workspace."""
    from spiraldev.injection import Anchor, AnchorKind, Snippet

    kinds = [AnchorKind.CREATE_FILE]
    nonempty = [p for p in files if files[p]]
    if files:
        kinds += [AnchorKind.FILE_START, AnchorKind.FILE_END, AnchorKind.AT_LINE]
    if nonempty:
        kinds += [AnchorKind.AFTER_MATCH, AnchorKind.BEFORE_MATCH]
    kind = rng.choice(kinds)
    if kind is AnchorKind.CREATE_FILE:
        name = "new_" + "".join(rng.choice(_NAME_CHARS) for _ in range(8)) + ".txt"
        while name in files:
            name += "x"
        anchor = Anchor(kind=kind, file=name)
        content = "" if rng.random() < 0.1 else random_content(rng)
        return Snippet(id=sid, anchor=anchor, content=content)
    if kind in (AnchorKind.AFTER_MATCH, AnchorKind.BEFORE_MATCH):
        path = rng.choice(nonempty)
        lines = files[path].splitlines()
        target = rng.choice(lines)
        matching = [l for l in lines if l.rstrip() == target.rstrip()]
        occurrence = rng.randint(1, len(matching))
        anchor = Anchor(kind=kind, file=path, match=target, occurrence=occurrence)
    elif kind is AnchorKind.AT_LINE:
        path = rng.choice(list(files))
        line_count = len(files[path].splitlines())
        anchor = Anchor(kind=kind, file=path, line=rng.randint(1, line_count + 1))
    else:
        path = rng.choice(list(files))
        anchor = Anchor(kind=kind, file=path)
    return Snippet(id=sid, anchor=anchor, content=random_content(rng))
