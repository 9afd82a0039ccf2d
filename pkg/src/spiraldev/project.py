"""Project persistence: directory layout, config, event log, caches.

Layout under the project root:
    workspace/      live prototype files (derived cache)
    snapshots/      snapshot store (append-only)
    session.jsonl   the event log, one event per line (source of truth)
    plan.json       derived cache of the current plan
    spec.json       derived cache of the project spec
    config.json     provider settings and digest algorithm

Events are flushed (write + fsync) before an operation is acknowledged;
loading replays the log and rebuilds the derived caches, so a process
killed at any point leaves a project that loads to a consistent stage.
A torn trailing line in the log belongs to an unacknowledged operation
and is ignored.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import CorruptProject, InvalidInput
from .orchestrator import Engine, EngineState, SessionEvent
from .provider import Provider, ScriptedProvider
from .provider.live import LiveProvider, LiveProviderConfig
from .snapshots import SnapshotStore
from .workspace import DIGEST_ALGORITHM, flush_workspace, fsync_dir

CONFIG_FILE = "config.json"
EVENT_LOG = "session.jsonl"
PLAN_CACHE = "plan.json"
SPEC_CACHE = "spec.json"
WORKSPACE_DIR = "workspace"
SNAPSHOT_DIR = "snapshots"


@dataclass
class ProjectConfig:
    provider: str = "live"  # "live" or "scripted:<path>"
    digest: str = DIGEST_ALGORITHM
    provider_url: str = ""
    provider_model: str = ""

    def to_doc(self) -> dict:
        return {
            "provider": self.provider,
            "digest": self.digest,
            "provider_url": self.provider_url,
            "provider_model": self.provider_model,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ProjectConfig":
        return cls(
            provider=doc.get("provider", "live"),
            digest=doc.get("digest", DIGEST_ALGORITHM),
            provider_url=doc.get("provider_url", ""),
            provider_model=doc.get("provider_model", ""),
        )


def build_provider(spec: str, base_dir: Optional[Path] = None) -> Provider:
    """Construct a provider from a ``live`` / ``scripted:<path>`` string."""
    if spec == "live":
        config = LiveProviderConfig.from_env(
            LiveProviderConfig()
        )
        return LiveProvider(config)
    if spec.startswith("scripted:"):
        fixture = Path(spec.split(":", 1)[1])
        if not fixture.is_absolute() and base_dir is not None:
            candidate = base_dir / fixture
            if candidate.exists():
                fixture = candidate
        if not fixture.exists():
            raise InvalidInput(f"fixture not found: {fixture}")
        return ScriptedProvider.from_file(fixture)
    raise InvalidInput(f"unknown provider spec {spec!r} (use live or scripted:<path>)")


@dataclass
class Project:
    root: Path
    config: ProjectConfig
    engine: Engine = field(repr=False, default=None)

    # --- lifecycle ---

    @classmethod
    def create(cls, root: Path, provider_spec: str = "live") -> "Project":
        root = Path(root)
        if (root / EVENT_LOG).exists():
            raise InvalidInput(f"project already exists at {root}")
        root.mkdir(parents=True, exist_ok=True)
        (root / WORKSPACE_DIR).mkdir(exist_ok=True)
        config = ProjectConfig(provider=provider_spec)
        (root / CONFIG_FILE).write_text(
            json.dumps(config.to_doc(), indent=2) + "\n", encoding="utf-8"
        )
        (root / EVENT_LOG).touch()
        project = cls(root=root, config=config)
        project._attach(Engine(
            provider=project._make_provider(),
            store=SnapshotStore(root=root / SNAPSHOT_DIR),
        ))
        return project

    @classmethod
    def load(cls, root: Path, provider_override: Optional[str] = None) -> "Project":
        root = Path(root)
        config_path = root / CONFIG_FILE
        if not config_path.exists():
            raise CorruptProject(f"no project at {root} ({CONFIG_FILE} missing)")
        config = ProjectConfig.from_doc(json.loads(config_path.read_text(encoding="utf-8")))
        if provider_override:
            config.provider = provider_override
        project = cls(root=root, config=config)
        event_docs = project._read_log()
        engine = Engine.rebuild(
            event_docs, store=SnapshotStore(root=root / SNAPSHOT_DIR)
        )
        provider = project._make_provider()
        if isinstance(provider, ScriptedProvider):
            # one exchange was consumed per captured payload; resume there
            provider.cursor = sum(len(e.gen) for e in engine.events)
        engine.provider = provider
        project._attach(engine)
        # repair derived caches in case the process died between the event
        # flush and the cache flush
        project._flush_caches(engine.state)
        return project

    def _make_provider(self) -> Optional[Provider]:
        try:
            return build_provider(self.config.provider, base_dir=self.root)
        except InvalidInput:
            # a missing fixture only matters once a generation is requested
            return None

    def _attach(self, engine: Engine) -> None:
        engine.event_sink = self._append_event
        engine.cache_flush = self._flush_caches
        self.engine = engine

    # --- persistence ---

    def _read_log(self) -> list[dict]:
        docs = []
        raw = (self.root / EVENT_LOG).read_text(encoding="utf-8")
        for line in raw.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                docs.append(json.loads(line))
            except json.JSONDecodeError:
                # torn trailing write from a crash mid-append
                break
        return docs

    def _append_event(self, event: SessionEvent) -> None:
        path = self.root / EVENT_LOG
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event.to_doc()) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        fsync_dir(self.root)

    def _flush_caches(self, state: EngineState) -> None:
        flush_workspace(state.workspace, self.root / WORKSPACE_DIR)
        if state.plan is not None:
            (self.root / PLAN_CACHE).write_text(
                json.dumps(state.plan.to_doc(), indent=2) + "\n", encoding="utf-8"
            )
        if state.spec is not None:
            (self.root / SPEC_CACHE).write_text(
                json.dumps(state.spec.to_doc(), indent=2) + "\n", encoding="utf-8"
            )

    # --- replay verification ---

    def verify_replay(self, fixture_provider: Optional[Provider] = None) -> int:
        """Re-execute the log against the scripted fixture; every recorded
        digest must be reproduced. Returns the number of verified events."""
        provider = fixture_provider
        if provider is None:
            if not self.config.provider.startswith("scripted:"):
                raise InvalidInput("replay verification requires a scripted provider")
            provider = build_provider(self.config.provider, base_dir=self.root)
        Engine.rebuild(self._read_log(), provider=provider, strict_fixture=True)
        return len(self.engine.events)
