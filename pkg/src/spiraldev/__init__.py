"""spiraldev: spiral-model orchestration for LLM-assisted UI prototyping.

Generate a spec and plan, execute tasks by injecting minimal snippets at
deterministic anchors, snapshot every approved state, and keep a human in
control via plan edits, redo-with-feedback, and rollback.
"""

from .errors import EngineError
from .injection import Anchor, AnchorKind, InjectionResult, Snippet, apply_batch, apply_snippet, revert
from .orchestrator import Engine, EngineState, SessionEvent, Stage
from .plan import Plan, ProjectSpec, Task, TaskStatus, create_plan
from .project import Project
from .snapshots import SnapshotStore

__all__ = [
    "Anchor",
    "AnchorKind",
    "Engine",
    "EngineError",
    "EngineState",
    "InjectionResult",
    "Plan",
    "Project",
    "ProjectSpec",
    "SessionEvent",
    "Snippet",
    "SnapshotStore",
    "Stage",
    "Task",
    "TaskStatus",
    "apply_batch",
    "apply_snippet",
    "create_plan",
    "revert",
]

__version__ = "0.1.0"
