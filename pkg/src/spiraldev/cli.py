"""Command-line interface for headless and scripted operation.

Every subcommand maps 1:1 onto an engine operation; errors exit nonzero
with the engine error name on stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .errors import EngineError
from .orchestrator import Stage
from .project import Project, build_provider
from .workspace import workspace_digest


def engine_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EngineError as err:
            click.echo(f"{err.name}: {err}", err=True)
            sys.exit(err.exit_code)

    return wrapper


@click.group()
@click.option(
    "-C",
    "--project-dir",
    "project_dir",
    default=".",
    type=click.Path(path_type=Path),
    help="Project directory (default: current directory).",
)
@click.option("--provider", "provider_spec", default=None,
              help="Override: live or scripted:<fixture.json>.")
@click.pass_context
def main(ctx, project_dir: Path, provider_spec):
    ctx.ensure_object(dict)
    ctx.obj["dir"] = project_dir
    ctx.obj["provider"] = provider_spec


def _load(ctx) -> Project:
    return Project.load(ctx.obj["dir"], provider_override=ctx.obj["provider"])


def _echo_status(project: Project) -> None:
    doc = project.engine.session_doc()
    click.echo(f"stage: {doc['stage']}")
    if doc["plan"]:
        for task in doc["plan"]["tasks"]:
            ref = f" [snapshot {task['snapshot_ref']}]" if task["snapshot_ref"] else ""
            click.echo(f"  {task['ordinal']}. [{task['status']}] {task['title']}{ref} ({task['id']})")


@main.command()
@click.argument("goal")
@engine_errors
@click.pass_context
def new(ctx, goal: str):
    """Create a project and generate the spec and synthetic data."""
    project = Project.create(ctx.obj["dir"], provider_spec=ctx.obj["provider"] or "live")
    project.engine.execute("start_session", {"goal": goal})
    _echo_status(project)


@main.group()
def spec():
    """Review the generated specification."""


@spec.command("show")
@engine_errors
@click.pass_context
def spec_show(ctx):
    project = _load(ctx)
    doc = project.engine.session_doc()["spec"]
    click.echo(json.dumps(doc, indent=2))


@spec.command("approve")
@engine_errors
@click.pass_context
def spec_approve(ctx):
    project = _load(ctx)
    project.engine.execute("review_spec", {"action": "approve"})
    _echo_status(project)


@spec.command("edit")
@click.option("--text", help="Replacement specification text.")
@click.option("--file", "file_", type=click.Path(exists=True, path_type=Path),
              help="Read replacement text from a file.")
@engine_errors
@click.pass_context
def spec_edit(ctx, text, file_):
    if file_ is not None:
        text = file_.read_text(encoding="utf-8")
    project = _load(ctx)
    project.engine.execute("review_spec", {"action": "edit", "text": text or ""})
    _echo_status(project)


@spec.command("regen")
@click.option("--feedback", default="")
@engine_errors
@click.pass_context
def spec_regen(ctx, feedback):
    project = _load(ctx)
    project.engine.execute("review_spec", {"action": "regenerate", "feedback": feedback})
    _echo_status(project)


@main.group()
def plan():
    """Show, edit, and approve the task plan."""


@plan.command("show")
@engine_errors
@click.pass_context
def plan_show(ctx):
    _echo_status(_load(ctx))


@plan.command("approve")
@engine_errors
@click.pass_context
def plan_approve(ctx):
    project = _load(ctx)
    project.engine.execute("review_plan", {"action": "approve"})
    _echo_status(project)


@plan.command("regen")
@engine_errors
@click.pass_context
def plan_regen(ctx):
    project = _load(ctx)
    project.engine.execute("review_plan", {"action": "regenerate"})
    _echo_status(project)


@plan.command("add")
@click.option("--title", required=True)
@click.option("--description", default="")
@click.option("--position", type=int, default=None)
@engine_errors
@click.pass_context
def plan_add(ctx, title, description, position):
    project = _load(ctx)
    args = {"title": title, "description": description}
    if position is not None:
        args["position"] = position
    project.engine.execute("add_task", args)
    _echo_status(project)


@plan.command("remove")
@click.argument("task_id")
@engine_errors
@click.pass_context
def plan_remove(ctx, task_id):
    project = _load(ctx)
    project.engine.execute("remove_task", {"task_id": task_id})
    _echo_status(project)


@plan.command("edit")
@click.argument("task_id")
@click.option("--title", required=True)
@click.option("--description", default="")
@engine_errors
@click.pass_context
def plan_edit(ctx, task_id, title, description):
    project = _load(ctx)
    project.engine.execute(
        "update_task", {"task_id": task_id, "title": title, "description": description}
    )
    _echo_status(project)


@main.group()
def task():
    """Run and resolve tasks."""


@task.command("run")
@click.argument("task_id", required=False)
@engine_errors
@click.pass_context
def task_run(ctx, task_id):
    project = _load(ctx)
    if task_id is None:
        nxt = project.engine.state.plan.next_pending() if project.engine.state.plan else None
        if nxt is None:
            click.echo("no pending task", err=True)
            sys.exit(1)
        task_id = nxt.id
    project.engine.execute("run_task", {"task_id": task_id})
    _echo_status(project)


@task.command("approve")
@engine_errors
@click.pass_context
def task_approve(ctx):
    project = _load(ctx)
    project.engine.execute("resolve_task", {"action": "approve"})
    _echo_status(project)


@task.command("redo")
@click.option("--feedback", default="")
@engine_errors
@click.pass_context
def task_redo(ctx, feedback):
    project = _load(ctx)
    project.engine.execute("resolve_task", {"action": "redo", "feedback": feedback})
    _echo_status(project)


@main.command()
@click.argument("snapshot_id", type=int)
@click.option("--confirm", is_flag=True, default=False)
@engine_errors
@click.pass_context
def rollback(ctx, snapshot_id, confirm):
    """Roll the workspace back to a snapshot (discards later state)."""
    project = _load(ctx)
    project.engine.execute("rollback_to", {"snapshot_id": snapshot_id, "confirm": confirm})
    _echo_status(project)


@main.command()
@engine_errors
@click.pass_context
def snapshots(ctx):
    """List snapshots with their superseded flags."""
    project = _load(ctx)
    for summary in project.engine.store.list():
        mark = " (superseded)" if summary.superseded else ""
        head = " <- head" if project.engine.store.head == summary.id else ""
        click.echo(
            f"{summary.id}: task {summary.task_id}, {summary.file_count} files{mark}{head}"
        )


@main.command()
@engine_errors
@click.pass_context
def replay(ctx):
    """Verify the event log replays identically against its fixture."""
    project = _load(ctx)
    count = project.verify_replay()
    click.echo(f"replayed {count} events, all digests match")


@main.command()
@engine_errors
@click.pass_context
def digest(ctx):
    """Print the current workspace digest."""
    project = _load(ctx)
    click.echo(workspace_digest(project.engine.state.workspace))


@main.command()
@click.option("--port", type=int, default=8321)
@click.option("--host", default="127.0.0.1")
@click.option("--ui-dist", type=click.Path(path_type=Path), default=None,
              help="Directory of built companion UI assets to serve at /.")
@engine_errors
@click.pass_context
def serve(ctx, port, host, ui_dist):
    """Serve the HTTP API and the live preview."""
    from .server import serve as run_server

    project = _load(ctx)
    run_server(project, port=port, host=host, ui_dist=ui_dist)


if __name__ == "__main__":
    main()
