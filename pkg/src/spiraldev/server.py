"""HTTP API + live preview server for a single project.

Every mutating endpoint forwards into the engine's single-writer queue
(the engine lock); reads serve the last consistent state. The preview
mounts the live workspace with no-cache headers so each approval or
rollback is immediately visible in an embedded frame.
"""

from __future__ import annotations

import errno
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .errors import (
    ActiveTaskExists,
    DuplicateTaskSnapshot,
    EngineError,
    FileMissing,
    FixtureExhausted,
    FixtureMismatch,
    IllegalTransition,
    NoActiveTask,
    NotNextTask,
    PortInUse,
    PositionBeforeApproved,
    SchemaInvalidAfterRetries,
    StaleInverse,
    TaskNotPending,
    TransportError,
    UnknownSnapshot,
    UnknownTask,
    WrongStage,
)
from .project import Project

_STATUS = {
    WrongStage: 409,
    ActiveTaskExists: 409,
    NotNextTask: 409,
    NoActiveTask: 409,
    TaskNotPending: 409,
    PositionBeforeApproved: 409,
    IllegalTransition: 409,
    DuplicateTaskSnapshot: 409,
    StaleInverse: 500,
    UnknownTask: 404,
    UnknownSnapshot: 404,
    FileMissing: 404,
    TransportError: 502,
    SchemaInvalidAfterRetries: 502,
    FixtureExhausted: 502,
    FixtureMismatch: 502,
}

_NO_CACHE = {"Cache-Control": "no-store, no-cache, must-revalidate", "Pragma": "no-cache"}

_CONTENT_TYPES = {
    ".html": "text/html",
    ".css": "text/css",
    ".js": "text/javascript",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".txt": "text/plain",
}


def _status_for(err: EngineError) -> int:
    for cls, code in _STATUS.items():
        if isinstance(err, cls):
            return code
    return 400


def create_app(project: Project, ui_dist: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="spiraldev", docs_url=None, redoc_url=None)
    engine = project.engine

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, err: EngineError):
        return JSONResponse(status_code=_status_for(err), content=err.to_doc())

    # --- session ---

    @app.post("/api/projects")
    def start_session(body: dict):
        engine.execute("start_session", {"goal": body.get("goal", "")})
        return engine.session_doc()

    @app.get("/api/session")
    def get_session():
        return engine.session_doc()

    @app.post("/api/spec/review")
    def review_spec(body: dict):
        engine.execute("review_spec", body)
        return engine.session_doc()

    @app.post("/api/plan/review")
    def review_plan(body: dict):
        engine.execute("review_plan", body)
        return engine.session_doc()

    @app.post("/api/plan/tasks")
    def add_task(body: dict):
        engine.execute("add_task", body)
        return engine.session_doc()

    @app.patch("/api/plan/tasks/{task_id}")
    def update_task(task_id: str, body: dict):
        engine.execute("update_task", {"task_id": task_id, **body})
        return engine.session_doc()

    @app.delete("/api/plan/tasks/{task_id}")
    def remove_task(task_id: str):
        engine.execute("remove_task", {"task_id": task_id})
        return engine.session_doc()

    @app.post("/api/tasks/{task_id}/run")
    def run_task(task_id: str):
        engine.execute("run_task", {"task_id": task_id})
        return engine.session_doc()

    @app.post("/api/tasks/{task_id}/resolve")
    def resolve_task(task_id: str, body: dict):
        pending = engine.state.pending
        if pending is None or pending.task_id != task_id:
            raise NoActiveTask(f"task {task_id} is not awaiting approval")
        engine.execute("resolve_task", body)
        return engine.session_doc()

    @app.post("/api/rollback")
    def rollback(body: dict):
        engine.execute(
            "rollback_to",
            {"snapshot_id": body.get("snapshot_id"), "confirm": bool(body.get("confirm"))},
        )
        return engine.session_doc()

    # --- snapshots ---

    @app.get("/api/snapshots")
    def list_snapshots():
        return {"snapshots": [s.to_doc() for s in engine.store.list()], "head": engine.store.head}

    @app.get("/api/snapshots/{snapshot_id}/files/{path:path}")
    def snapshot_file(snapshot_id: int, path: str):
        files = engine.store.restore(snapshot_id)
        if path not in files:
            raise FileMissing(path)
        media = _CONTENT_TYPES.get(Path(path).suffix, "text/plain")
        return Response(content=files[path], media_type=media, headers=_NO_CACHE)

    # --- events (plain read + long-poll) ---

    @app.get("/api/events")
    def events(after: int = 0, wait: float = 0):
        deadline = time.monotonic() + min(wait, 30.0)
        with engine.changed:
            while len(engine.events) <= after and wait > 0:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                engine.changed.wait(remaining)
            docs = [e.to_doc() for e in engine.events[after:]]
        return {"events": docs, "last_seq": after + len(docs)}

    # --- preview ---

    @app.get("/preview/{path:path}")
    def preview(path: str):
        files = engine.state.workspace
        if path in ("", "/"):
            path = "index.html"
        if ".." in path.split("/") or path.startswith("/"):
            raise FileMissing(path)
        if path not in files:
            raise FileMissing(path)
        media = _CONTENT_TYPES.get(Path(path).suffix, "text/plain")
        return Response(content=files[path], media_type=media, headers=_NO_CACHE)

    # --- companion UI (built assets), when present ---

    if ui_dist is not None and ui_dist.is_dir():
        app.mount("/", StaticFiles(directory=ui_dist, html=True), name="ui")

    return app


def serve(project: Project, port: int, host: str = "127.0.0.1",
          ui_dist: Optional[Path] = None) -> None:
    import uvicorn

    app = create_app(project, ui_dist=ui_dist)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as err:
        if err.errno == errno.EADDRINUSE:
            raise PortInUse(str(port)) from err
        raise
