"""Content-addressed workspace snapshots with rollback.

Every approved task's workspace is captured as a manifest (path -> content
digest) over a shared blob store, so identical files across snapshots cost
one blob. The store is append-only: rollback never deletes anything, it
moves head and flags later snapshots as superseded.

On disk (when bound to a directory):
    snapshots/manifest-<id>.json
    snapshots/blobs/<digest>
    snapshots/history.json        (head + superseded ids; rewritten)
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import DuplicateTaskSnapshot, UnknownSnapshot
from .workspace import Workspace, file_digest


@dataclass(frozen=True)
class Snapshot:
    id: int
    task_id: str
    created_at: float
    manifest: dict[str, str]  # path -> content digest

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "task_id": self.task_id,
            "created_at": self.created_at,
            "manifest": dict(sorted(self.manifest.items())),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Snapshot":
        return cls(
            id=doc["id"],
            task_id=doc["task_id"],
            created_at=doc["created_at"],
            manifest=dict(doc["manifest"]),
        )


@dataclass(frozen=True)
class SnapshotSummary:
    id: int
    task_id: str
    file_count: int
    superseded: bool

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "task_id": self.task_id,
            "file_count": self.file_count,
            "superseded": self.superseded,
        }


@dataclass
class SnapshotStore:
    """In-memory snapshot history, optionally write-through to a directory."""

    root: Optional[Path] = None
    snapshots: list[Snapshot] = field(default_factory=list)
    blobs: dict[str, str] = field(default_factory=dict)
    head: Optional[int] = None
    superseded: set[int] = field(default_factory=set)

    def commit(self, task_id: str, files: Workspace, created_at: Optional[float] = None) -> int:
        """Capture the workspace under the next snapshot id; head follows."""
        for snap in self.snapshots:
            if snap.task_id == task_id and snap.id not in self.superseded:
                raise DuplicateTaskSnapshot(task_id)
        manifest: dict[str, str] = {}
        new_blobs: dict[str, str] = {}
        for path, content in files.items():
            digest = file_digest(content)
            manifest[path] = digest
            if digest not in self.blobs:
                new_blobs[digest] = content
        snapshot = Snapshot(
            id=(self.snapshots[-1].id + 1) if self.snapshots else 1,
            task_id=task_id,
            created_at=created_at if created_at is not None else time.time(),
            manifest=manifest,
        )
        self.blobs.update(new_blobs)
        self.snapshots.append(snapshot)
        self.head = snapshot.id
        self._flush(snapshot, new_blobs)
        return snapshot.id

    def get(self, snapshot_id: int) -> Snapshot:
        for snap in self.snapshots:
            if snap.id == snapshot_id:
                return snap
        raise UnknownSnapshot(str(snapshot_id))

    def restore(self, snapshot_id: int) -> Workspace:
        """Materialize a snapshot's files without moving head."""
        snap = self.get(snapshot_id)
        return {path: self.blobs[digest] for path, digest in snap.manifest.items()}

    def rollback(self, snapshot_id: int) -> tuple[Workspace, list[int]]:
        """Move head back to snapshot_id.

        Returns the restored workspace and the ids newly flagged as
        superseded (every non-superseded snapshot after the target).
        """
        files = self.restore(snapshot_id)
        newly = [
            s.id
            for s in self.snapshots
            if s.id > snapshot_id and s.id not in self.superseded
        ]
        self.superseded.update(newly)
        self.head = snapshot_id
        self._flush_history()
        return files, newly

    def list(self) -> list[SnapshotSummary]:
        return [
            SnapshotSummary(
                id=s.id,
                task_id=s.task_id,
                file_count=len(s.manifest),
                superseded=s.id in self.superseded,
            )
            for s in self.snapshots
        ]

    # --- persistence ---

    def _flush(self, snapshot: Snapshot, new_blobs: dict[str, str]) -> None:
        if self.root is None:
            return
        blob_dir = self.root / "blobs"
        blob_dir.mkdir(parents=True, exist_ok=True)
        for digest, content in new_blobs.items():
            target = blob_dir / digest
            if not target.exists():
                target.write_text(content, encoding="utf-8", newline="")
        manifest_path = self.root / f"manifest-{snapshot.id}.json"
        manifest_path.write_text(
            json.dumps(snapshot.to_doc(), indent=2) + "\n", encoding="utf-8"
        )
        self._flush_history()

    def _flush_history(self) -> None:
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        doc = {"head": self.head, "superseded": sorted(self.superseded)}
        (self.root / "history.json").write_text(
            json.dumps(doc, indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, root: Path) -> "SnapshotStore":
        store = cls(root=root)
        if not root.is_dir():
            return store
        for manifest_path in sorted(
            root.glob("manifest-*.json"), key=lambda p: int(p.stem.split("-")[1])
        ):
            snap = Snapshot.from_doc(json.loads(manifest_path.read_text(encoding="utf-8")))
            store.snapshots.append(snap)
        blob_dir = root / "blobs"
        if blob_dir.is_dir():
            for blob in blob_dir.iterdir():
                store.blobs[blob.name] = blob.read_text(encoding="utf-8")
        history_path = root / "history.json"
        if history_path.exists():
            doc = json.loads(history_path.read_text(encoding="utf-8"))
            store.head = doc.get("head")
            store.superseded = set(doc.get("superseded", []))
        elif store.snapshots:
            store.head = store.snapshots[-1].id
        return store
