"""Project specification and the mutable task plan.

Plans are immutable values: every operation returns a fresh Plan (or
raises, leaving the input untouched). The task status machine has exactly
six legal transitions; everything else is IllegalTransition.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional, Sequence

from .errors import (
    ActiveTaskExists,
    EmptyPlan,
    IllegalTransition,
    PositionBeforeApproved,
    TaskNotPending,
    UnknownTask,
)

PLAN_DOC_VERSION = 1


class TaskStatus(str, Enum):
    PENDING = "pending"
    GENERATING = "generating"
    AWAITING_APPROVAL = "awaiting_approval"
    APPROVED = "approved"
    ROLLED_BACK = "rolled_back"


class TaskOrigin(str, Enum):
    INITIAL = "initial"
    ADAPTIVE = "adaptive"


#: the six legal status transitions
LEGAL_TRANSITIONS: frozenset[tuple[TaskStatus, TaskStatus]] = frozenset(
    {
        (TaskStatus.PENDING, TaskStatus.GENERATING),
        (TaskStatus.GENERATING, TaskStatus.AWAITING_APPROVAL),
        (TaskStatus.GENERATING, TaskStatus.PENDING),
        (TaskStatus.AWAITING_APPROVAL, TaskStatus.APPROVED),
        (TaskStatus.AWAITING_APPROVAL, TaskStatus.GENERATING),
        (TaskStatus.APPROVED, TaskStatus.ROLLED_BACK),
    }
)

ACTIVE_STATUSES = (TaskStatus.GENERATING, TaskStatus.AWAITING_APPROVAL)


@dataclass(frozen=True)
class ProjectSpec:
    goal: str
    specification: str = ""
    dataset: tuple[dict, ...] = ()
    approved: bool = False

    def __post_init__(self):
        if not self.goal.strip():
            raise ValueError("goal must be non-empty")

    def to_doc(self) -> dict:
        return {
            "goal": self.goal,
            "specification": self.specification,
            "dataset": [dict(r) for r in self.dataset],
            "approved": self.approved,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ProjectSpec":
        return cls(
            goal=doc["goal"],
            specification=doc.get("specification", ""),
            dataset=tuple(doc.get("dataset", [])),
            approved=bool(doc.get("approved", False)),
        )


@dataclass(frozen=True)
class Task:
    id: str
    ordinal: int
    title: str
    description: str
    status: TaskStatus = TaskStatus.PENDING
    origin: TaskOrigin = TaskOrigin.INITIAL
    snapshot_ref: Optional[int] = None

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "ordinal": self.ordinal,
            "title": self.title,
            "description": self.description,
            "status": self.status.value,
            "origin": self.origin.value,
            "snapshot_ref": self.snapshot_ref,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Task":
        return cls(
            id=doc["id"],
            ordinal=doc["ordinal"],
            title=doc["title"],
            description=doc["description"],
            status=TaskStatus(doc["status"]),
            origin=TaskOrigin(doc["origin"]),
            snapshot_ref=doc.get("snapshot_ref"),
        )


@dataclass(frozen=True)
class Plan:
    tasks: tuple[Task, ...] = ()
    revision: int = 0
    #: next value of the session-scoped id counter; ids are never reused,
    #: which also keeps them reproducible under event-log replay
    next_id: int = 1

    def get(self, task_id: str) -> Task:
        for task in self.tasks:
            if task.id == task_id:
                return task
        raise UnknownTask(task_id)

    def active_task(self) -> Optional[Task]:
        for task in self.tasks:
            if task.status in ACTIVE_STATUSES:
                return task
        return None

    def next_pending(self) -> Optional[Task]:
        for task in self.tasks:
            if task.status is TaskStatus.PENDING:
                return task
        return None

    def all_pending(self) -> bool:
        return all(t.status is TaskStatus.PENDING for t in self.tasks)

    def to_doc(self) -> dict:
        return {
            "version": PLAN_DOC_VERSION,
            "revision": self.revision,
            "next_id": self.next_id,
            "tasks": [t.to_doc() for t in self.tasks],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Plan":
        return cls(
            tasks=tuple(Task.from_doc(t) for t in doc.get("tasks", [])),
            revision=doc.get("revision", 0),
            next_id=doc.get("next_id", 1),
        )


def check_invariants(plan: Plan) -> None:
    """Raise AssertionError if any plan invariant is violated."""
    ordinals = [t.ordinal for t in plan.tasks]
    assert ordinals == list(range(1, len(plan.tasks) + 1)), "ordinals not contiguous"
    ids = [t.id for t in plan.tasks]
    assert len(set(ids)) == len(ids), "duplicate task ids"
    active = [t for t in plan.tasks if t.status in ACTIVE_STATUSES]
    assert len(active) <= 1, "more than one active task"
    for task in plan.tasks:
        has_ref = task.snapshot_ref is not None
        should = task.status in (TaskStatus.APPROVED, TaskStatus.ROLLED_BACK)
        assert has_ref == should, f"snapshot_ref mismatch on {task.id}"
    # approved tasks precede pending tasks
    last_approved = max(
        (t.ordinal for t in plan.tasks if t.status is TaskStatus.APPROVED), default=0
    )
    first_pending = min(
        (t.ordinal for t in plan.tasks if t.status is TaskStatus.PENDING),
        default=len(plan.tasks) + 1,
    )
    assert last_approved < first_pending, "approved task after a pending task"


def _renumber(tasks: Sequence[Task]) -> tuple[Task, ...]:
    return tuple(replace(t, ordinal=i + 1) for i, t in enumerate(tasks))


def create_plan(descriptions: Sequence[tuple[str, str]], start_id: int = 1) -> Plan:
    """Build a fresh all-Pending plan from (title, description) pairs.

    start_id continues the id counter when a plan wholesale-replaces an
    earlier one, so ids stay unique across the session.
    """
    if not descriptions:
        raise EmptyPlan("cannot create a plan with no tasks")
    tasks = tuple(
        Task(
            id=f"t{start_id + i}",
            ordinal=i + 1,
            title=title,
            description=description,
            origin=TaskOrigin.INITIAL,
        )
        for i, (title, description) in enumerate(descriptions)
    )
    return Plan(tasks=tasks, revision=0, next_id=start_id + len(tasks))


def add_task(
    plan: Plan, title: str, description: str, position: Optional[int] = None
) -> Plan:
    """Insert a new Pending task with origin Adaptive.

    position is a 1-based ordinal; it must fall after every non-Pending
    task (the completed prefix is immutable). Default is append-at-end.
    """
    last_fixed = max(
        (t.ordinal for t in plan.tasks if t.status is not TaskStatus.PENDING), default=0
    )
    if position is None:
        position = len(plan.tasks) + 1
    if position <= last_fixed:
        raise PositionBeforeApproved(
            f"position {position} precedes the completed prefix (ends at {last_fixed})"
        )
    if not 1 <= position <= len(plan.tasks) + 1:
        raise PositionBeforeApproved(f"position {position} out of range")
    task = Task(
        id=f"t{plan.next_id}",
        ordinal=position,
        title=title,
        description=description,
        origin=TaskOrigin.ADAPTIVE,
    )
    tasks = list(plan.tasks)
    tasks.insert(position - 1, task)
    return Plan(
        tasks=_renumber(tasks), revision=plan.revision + 1, next_id=plan.next_id + 1
    )


def update_task(plan: Plan, task_id: str, title: str, description: str) -> Plan:
    task = plan.get(task_id)
    if task.status is not TaskStatus.PENDING:
        raise TaskNotPending(f"task {task_id} is {task.status.value}")
    tasks = tuple(
        replace(t, title=title, description=description) if t.id == task_id else t
        for t in plan.tasks
    )
    return replace(plan, tasks=tasks, revision=plan.revision + 1)


def remove_task(plan: Plan, task_id: str) -> Plan:
    task = plan.get(task_id)
    if task.status is not TaskStatus.PENDING:
        raise TaskNotPending(f"task {task_id} is {task.status.value}")
    tasks = [t for t in plan.tasks if t.id != task_id]
    return replace(plan, tasks=_renumber(tasks), revision=plan.revision + 1)


def transition(
    plan: Plan,
    task_id: str,
    new_status: TaskStatus,
    snapshot_ref: Optional[int] = None,
) -> Plan:
    """Move one task along the status machine.

    snapshot_ref is required when entering Approved and ignored otherwise;
    RolledBack keeps the ref recorded at approval.
    """
    task = plan.get(task_id)
    if (task.status, new_status) not in LEGAL_TRANSITIONS:
        raise IllegalTransition(f"{task.status.value} -> {new_status.value}")
    if new_status is TaskStatus.GENERATING:
        active = plan.active_task()
        if active is not None and active.id != task_id:
            raise ActiveTaskExists(active.id)
    if new_status is TaskStatus.APPROVED:
        if snapshot_ref is None:
            raise IllegalTransition("approval requires a snapshot_ref")
        updated = replace(task, status=new_status, snapshot_ref=snapshot_ref)
    elif new_status is TaskStatus.ROLLED_BACK:
        updated = replace(task, status=new_status)
    else:
        updated = replace(task, status=new_status, snapshot_ref=None)
    tasks = tuple(updated if t.id == task_id else t for t in plan.tasks)
    return replace(plan, tasks=tasks, revision=plan.revision + 1)
