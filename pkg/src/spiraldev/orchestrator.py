"""Session state machine tying plan, provider, injection, and snapshots
into the spiral loop with a human approval gate at every stage.

Every successful mutation appends one SessionEvent carrying the operation
arguments, the provider payloads it consumed, and the workspace digest
after the event. The event log is the single source of truth: a session is
rebuilt by re-executing its events (with the recorded payloads standing in
for the provider), and replay against the original fixture must reproduce
every digest.

Engine operations are transactional: a new state value is computed first
and swapped in only after the event is durably recorded, so any error is
a strict no-op.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Optional, Sequence

from . import plan as planmod
from .errors import (
    ActiveTaskExists,
    CorruptProject,
    EngineError,
    InvalidInput,
    NoActiveTask,
    NotNextTask,
    ReplayDivergence,
    Unconfirmed,
    WrongStage,
)
from .injection import InjectionResult, Snippet, apply_batch, revert
from .plan import Plan, ProjectSpec, TaskStatus
from .provider import (
    GenerationRequest,
    Provider,
    RecordingProvider,
    ReplayProvider,
)
from .snapshots import SnapshotStore
from .workspace import (
    Workspace,
    is_safe_relpath,
    normalize_text,
    numbered_listing,
    workspace_digest,
)

DATASET_FILE = "data.json"


class Stage(str, Enum):
    DRAFTING = "drafting"
    SPEC_REVIEW = "spec_review"
    PLAN_REVIEW = "plan_review"
    EXECUTING = "executing"
    IDLE = "idle"


@dataclass(frozen=True)
class PendingBatch:
    """The applied-but-not-yet-approved snippet batch of the active task."""

    task_id: str
    snippets: tuple[dict, ...]  # wire documents, for redo context and the UI
    results: tuple[InjectionResult, ...]
    feedback: tuple[str, ...] = ()  # accumulated redo feedback for this task

    def to_doc(self) -> dict:
        return {
            "task_id": self.task_id,
            "snippets": [dict(s) for s in self.snippets],
            "results": [r.to_doc() for r in self.results],
            "feedback": list(self.feedback),
        }


@dataclass(frozen=True)
class EngineState:
    stage: Stage = Stage.DRAFTING
    spec: Optional[ProjectSpec] = None
    plan: Optional[Plan] = None
    workspace: Workspace = field(default_factory=dict)
    pending: Optional[PendingBatch] = None

    def digest(self) -> str:
        return workspace_digest(self.workspace)


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    ts: float
    verb: str
    args: dict
    gen: tuple[dict, ...]  # provider payloads consumed by this event
    digest: str  # workspace digest after the event

    def to_doc(self) -> dict:
        return {
            "seq": self.seq,
            "ts": self.ts,
            "verb": self.verb,
            "args": self.args,
            "gen": list(self.gen),
            "digest": self.digest,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SessionEvent":
        return cls(
            seq=doc["seq"],
            ts=doc["ts"],
            verb=doc["verb"],
            args=doc["args"],
            gen=tuple(doc.get("gen", [])),
            digest=doc["digest"],
        )


VERBS = (
    "start_session",
    "review_spec",
    "review_plan",
    "add_task",
    "update_task",
    "remove_task",
    "run_task",
    "resolve_task",
    "rollback_to",
)


class Engine:
    """Single-writer session engine.

    event_sink is called with each new event before the in-memory state is
    swapped (durability before acknowledgment); cache_flush is called after
    with the new state (derived caches: workspace dir, plan/spec files).
    """

    def __init__(
        self,
        provider: Optional[Provider] = None,
        store: Optional[SnapshotStore] = None,
        event_sink: Optional[Callable[[SessionEvent], None]] = None,
        cache_flush: Optional[Callable[[EngineState], None]] = None,
        clock: Callable[[], float] = time.time,
    ):
        self.provider = provider
        self.store = store if store is not None else SnapshotStore()
        self.event_sink = event_sink
        self.cache_flush = cache_flush
        self.clock = clock
        self.state = EngineState()
        self.events: list[SessionEvent] = []
        self.lock = threading.Lock()
        self.changed = threading.Condition(self.lock)

    # --- public operations ---

    def execute(self, verb: str, args: dict) -> SessionEvent:
        """Run one mutating operation; append its event; return it."""
        if verb not in VERBS:
            raise InvalidInput(f"unknown operation {verb!r}")
        with self.lock:
            recorder = RecordingProvider(self.provider) if self.provider else None
            ts = self.clock()
            new_state = self._handle(verb, args, recorder, ts)
            event = SessionEvent(
                seq=len(self.events) + 1,
                ts=ts,
                verb=verb,
                args=args,
                gen=tuple(recorder.captured) if recorder else (),
                digest=new_state.digest(),
            )
            if self.event_sink is not None:
                self.event_sink(event)
            self.state = new_state
            self.events.append(event)
            if self.cache_flush is not None:
                self.cache_flush(new_state)
            self.changed.notify_all()
            return event

    def session_doc(self) -> dict:
        state = self.state
        return {
            "stage": state.stage.value,
            "spec": state.spec.to_doc() if state.spec else None,
            "plan": state.plan.to_doc() if state.plan else None,
            "pending": state.pending.to_doc() if state.pending else None,
            "snapshots": [s.to_doc() for s in self.store.list()],
            "head": self.store.head,
            "last_seq": len(self.events),
        }

    # --- replay / rebuild ---

    @classmethod
    def rebuild(
        cls,
        event_docs: Sequence[dict],
        provider: Optional[Provider] = None,
        store: Optional[SnapshotStore] = None,
        strict_fixture: bool = False,
    ) -> "Engine":
        """Re-execute an event log.

        With provider=None each event replays from its recorded payloads
        (loading a project); with a provider the exchanges are regenerated
        and must reproduce every recorded digest (replay verification).
        Divergence raises ReplayDivergence when strict_fixture is set,
        CorruptProject otherwise.
        """
        engine = cls(provider=None, store=store)

        def fail(seq: int, detail: str) -> EngineError:
            if strict_fixture:
                return ReplayDivergence(seq, detail)
            return CorruptProject(f"event {seq}: {detail}")

        for i, doc in enumerate(event_docs):
            try:
                event = SessionEvent.from_doc(doc)
            except (KeyError, TypeError) as err:
                raise fail(i + 1, f"malformed event: {err}") from err
            if event.seq != i + 1:
                raise fail(i + 1, f"sequence gap (found {event.seq})")
            if provider is not None:
                ev_provider: Provider = RecordingProvider(provider)
            else:
                ev_provider = ReplayProvider(list(event.gen))
            try:
                new_state = engine._handle(event.verb, event.args, ev_provider, event.ts)
            except EngineError as err:
                raise fail(event.seq, f"{err.name}: {err}") from err
            if provider is not None and tuple(ev_provider.captured) != event.gen:
                raise fail(event.seq, "regenerated payloads differ from the recorded ones")
            digest = new_state.digest()
            if digest != event.digest:
                raise fail(event.seq, f"digest mismatch ({digest} != {event.digest})")
            engine.state = new_state
            engine.events.append(event)
        return engine

    # --- operation handlers (pure: state in, state out) ---

    def _handle(
        self, verb: str, args: dict, provider: Optional[Provider], ts: float
    ) -> EngineState:
        handler = getattr(self, f"_h_{verb}")
        return handler(self.state, dict(args), provider, ts)

    def _gen(self, provider: Optional[Provider], kind: str, context: dict) -> dict:
        if provider is None:
            raise InvalidInput("no generation provider configured")
        return provider.generate(GenerationRequest(kind, context)).payload

    def _spec_context(self, spec: ProjectSpec) -> dict:
        return {"goal": spec.goal, "specification": spec.specification}

    def _task_context(self, state: EngineState, task: planmod.Task, files: Workspace) -> dict:
        return {
            **self._spec_context(state.spec),
            "task": {"title": task.title, "description": task.description},
            "workspace": numbered_listing(files),
        }

    def _h_start_session(self, state, args, provider, ts) -> EngineState:
        if state.stage is not Stage.DRAFTING or state.spec is not None:
            raise WrongStage("session already started")
        goal = args.get("goal", "")
        if not isinstance(goal, str) or not goal.strip():
            raise InvalidInput("goal must be non-empty")
        spec_payload = self._gen(provider, "spec", {"goal": goal})
        data_payload = self._gen(
            provider, "data", {"goal": goal, "specification": spec_payload["specification"]}
        )
        spec = ProjectSpec(
            goal=goal,
            specification=spec_payload["specification"],
            dataset=tuple(data_payload["records"]),
        )
        return replace(state, stage=Stage.SPEC_REVIEW, spec=spec)

    def _h_review_spec(self, state, args, provider, ts) -> EngineState:
        if state.stage is not Stage.SPEC_REVIEW:
            raise WrongStage(f"spec review not available in stage {state.stage.value}")
        action = args.get("action")
        spec = state.spec
        if action == "approve":
            approved = replace(spec, approved=True)
            files = dict(state.workspace)
            files[DATASET_FILE] = normalize_text(
                json.dumps([dict(r) for r in spec.dataset], indent=2)
            )
            plan_payload = self._gen(provider, "plan", self._spec_context(spec))
            new_plan = planmod.create_plan(
                [(t["title"], t.get("description", "")) for t in plan_payload["tasks"]],
                start_id=state.plan.next_id if state.plan else 1,
            )
            return replace(
                state, stage=Stage.PLAN_REVIEW, spec=approved, plan=new_plan, workspace=files
            )
        if action == "regenerate":
            feedback = args.get("feedback", "")
            spec_payload = self._gen(
                provider, "spec", {"goal": spec.goal, "feedback": feedback}
            )
            data_payload = self._gen(
                provider,
                "data",
                {
                    "goal": spec.goal,
                    "specification": spec_payload["specification"],
                    "feedback": feedback,
                },
            )
            fresh = ProjectSpec(
                goal=spec.goal,
                specification=spec_payload["specification"],
                dataset=tuple(data_payload["records"]),
            )
            return replace(state, spec=fresh)
        if action == "edit":
            text = args.get("text")
            if not isinstance(text, str) or not text.strip():
                raise InvalidInput("edit requires non-empty text")
            return replace(state, spec=replace(spec, specification=text, approved=False))
        raise InvalidInput(f"unknown spec review action {action!r}")

    def _h_review_plan(self, state, args, provider, ts) -> EngineState:
        if state.stage is not Stage.PLAN_REVIEW:
            raise WrongStage(f"plan review not available in stage {state.stage.value}")
        action = args.get("action")
        if action == "approve":
            return replace(state, stage=Stage.IDLE)
        if action == "regenerate":
            if not state.plan.all_pending():
                raise WrongStage("plan regeneration is only legal before execution starts")
            payload = self._gen(provider, "plan", self._spec_context(state.spec))
            new_plan = planmod.create_plan(
                [(t["title"], t.get("description", "")) for t in payload["tasks"]],
                start_id=state.plan.next_id,
            )
            return replace(state, plan=new_plan)
        raise InvalidInput(f"unknown plan review action {action!r}")

    def _plan_edit_stage(self, state) -> None:
        if state.stage not in (Stage.PLAN_REVIEW, Stage.IDLE, Stage.EXECUTING):
            raise WrongStage(f"plan edits not available in stage {state.stage.value}")

    def _h_add_task(self, state, args, provider, ts) -> EngineState:
        self._plan_edit_stage(state)
        new_plan = planmod.add_task(
            state.plan, args["title"], args.get("description", ""), args.get("position")
        )
        return replace(state, plan=new_plan)

    def _h_update_task(self, state, args, provider, ts) -> EngineState:
        self._plan_edit_stage(state)
        new_plan = planmod.update_task(
            state.plan, args["task_id"], args["title"], args.get("description", "")
        )
        return replace(state, plan=new_plan)

    def _h_remove_task(self, state, args, provider, ts) -> EngineState:
        self._plan_edit_stage(state)
        new_plan = planmod.remove_task(state.plan, args["task_id"])
        return replace(state, plan=new_plan)

    def _h_run_task(self, state, args, provider, ts) -> EngineState:
        if state.stage is Stage.EXECUTING or state.pending is not None:
            raise ActiveTaskExists(state.plan.active_task().id)
        if state.stage is not Stage.IDLE:
            raise WrongStage(f"cannot run tasks in stage {state.stage.value}")
        task = state.plan.get(args["task_id"])
        nxt = state.plan.next_pending()
        if nxt is None or nxt.id != task.id:
            raise NotNextTask(
                f"task {task.id} is not the next pending task"
                + (f" (next is {nxt.id})" if nxt else "")
            )
        plan1 = planmod.transition(state.plan, task.id, TaskStatus.GENERATING)
        payload = self._gen(
            provider, "snippets", self._task_context(state, task, state.workspace)
        )
        snippets = [Snippet.from_doc(d) for d in payload["snippets"]]
        files, results = apply_batch(state.workspace, snippets)
        plan2 = planmod.transition(plan1, task.id, TaskStatus.AWAITING_APPROVAL)
        pending = PendingBatch(
            task_id=task.id,
            snippets=tuple(payload["snippets"]),
            results=tuple(results),
        )
        return replace(
            state, stage=Stage.EXECUTING, plan=plan2, workspace=files, pending=pending
        )

    def _h_resolve_task(self, state, args, provider, ts) -> EngineState:
        if state.pending is None:
            raise NoActiveTask("no task is awaiting approval")
        action = args.get("action")
        pending = state.pending
        if action == "approve":
            return self._approve(state, state.workspace, ts)
        if action == "manual_override":
            edits = args.get("files")
            if not isinstance(edits, dict) or not edits:
                raise InvalidInput("manual_override requires a files mapping")
            files = dict(state.workspace)
            for path, content in edits.items():
                if not is_safe_relpath(path):
                    raise InvalidInput(f"unsafe workspace path {path!r}")
                if not isinstance(content, str):
                    raise InvalidInput(f"file {path!r}: content must be text")
                files[path] = normalize_text(content)
            return self._approve(state, files, ts)
        if action == "redo":
            feedback = args.get("feedback", "")
            base = revert(state.workspace, pending.results)
            plan1 = planmod.transition(state.plan, pending.task_id, TaskStatus.GENERATING)
            task = plan1.get(pending.task_id)
            chain = pending.feedback + ((feedback,) if feedback else ())
            payload = self._gen(
                provider,
                "redo",
                {
                    **self._task_context(state, task, base),
                    "feedback": "\n".join(chain) or "(none)",
                    "previous_snippets": list(pending.snippets),
                },
            )
            snippets = [Snippet.from_doc(d) for d in payload["snippets"]]
            files, results = apply_batch(base, snippets)
            plan2 = planmod.transition(plan1, task.id, TaskStatus.AWAITING_APPROVAL)
            return replace(
                state,
                plan=plan2,
                workspace=files,
                pending=PendingBatch(
                    task_id=task.id,
                    snippets=tuple(payload["snippets"]),
                    results=tuple(results),
                    feedback=chain,
                ),
            )
        raise InvalidInput(f"unknown resolve action {action!r}")

    def _approve(self, state: EngineState, files: Workspace, ts: float) -> EngineState:
        task_id = state.pending.task_id
        snapshot_id = self.store.commit(task_id, files, created_at=ts)
        new_plan = planmod.transition(
            state.plan, task_id, TaskStatus.APPROVED, snapshot_ref=snapshot_id
        )
        return replace(
            state, stage=Stage.IDLE, plan=new_plan, workspace=files, pending=None
        )

    def _h_rollback_to(self, state, args, provider, ts) -> EngineState:
        if state.pending is not None or state.stage is Stage.EXECUTING:
            raise ActiveTaskExists("resolve the active task before rolling back")
        if state.stage is not Stage.IDLE:
            raise WrongStage(f"rollback not available in stage {state.stage.value}")
        snapshot_id = args.get("snapshot_id")
        self.store.get(snapshot_id)  # UnknownSnapshot before the confirm gate
        if not args.get("confirm"):
            raise Unconfirmed("rollback discards uncommitted changes; pass confirm")
        files, superseded = self.store.rollback(snapshot_id)
        new_plan = state.plan
        for sid in superseded:
            for task in new_plan.tasks:
                if task.snapshot_ref == sid and task.status is TaskStatus.APPROVED:
                    new_plan = planmod.transition(new_plan, task.id, TaskStatus.ROLLED_BACK)
        return replace(state, stage=Stage.IDLE, plan=new_plan, workspace=files)
