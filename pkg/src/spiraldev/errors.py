"""Engine error hierarchy.

Every error the engine can surface to a caller (CLI exit, HTTP body, UI
message) is a subclass of EngineError and is identified by its class name.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-level failures."""

    #: process exit code used by the CLI
    exit_code = 1

    @property
    def name(self) -> str:
        return type(self).__name__

    def to_doc(self) -> dict:
        return {"error": self.name, "detail": str(self)}


class InvalidInput(EngineError):
    pass


# --- plan module ---

class EmptyPlan(EngineError):
    pass


class PositionBeforeApproved(EngineError):
    pass


class TaskNotPending(EngineError):
    pass


class UnknownTask(EngineError):
    pass


class IllegalTransition(EngineError):
    pass


class ActiveTaskExists(EngineError):
    pass


# --- injection module ---

class FileMissing(EngineError):
    pass


class MatchNotFound(EngineError):
    pass


class LineOutOfRange(EngineError):
    pass


class FileExists(EngineError):
    pass


class BatchFailed(EngineError):
    def __init__(self, index: int, cause: EngineError):
        super().__init__(f"snippet {index}: {cause.name}: {cause}")
        self.index = index
        self.cause = cause


class StaleInverse(EngineError):
    pass


# --- state module ---

class DuplicateTaskSnapshot(EngineError):
    pass


class UnknownSnapshot(EngineError):
    pass


# --- provider module ---

class SchemaViolation(EngineError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class SchemaInvalidAfterRetries(EngineError):
    def __init__(self, last: SchemaViolation):
        super().__init__(str(last))
        self.last = last


class TransportError(EngineError):
    pass


class FixtureExhausted(EngineError):
    pass


class FixtureMismatch(EngineError):
    pass


# --- orchestrator module ---

class WrongStage(EngineError):
    pass


class NotNextTask(EngineError):
    pass


class NoActiveTask(EngineError):
    pass


class Unconfirmed(EngineError):
    exit_code = 2


class ReplayDivergence(EngineError):
    def __init__(self, sequence: int, detail: str = ""):
        super().__init__(f"event {sequence}: {detail}" if detail else f"event {sequence}")
        self.sequence = sequence


# --- service ---

class CorruptProject(EngineError):
    pass


class PortInUse(EngineError):
    pass
