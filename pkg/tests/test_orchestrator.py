import copy
import json

import pytest

from spiraldev.errors import (
    ActiveTaskExists,
    BatchFailed,
    CorruptProject,
    InvalidInput,
    NoActiveTask,
    NotNextTask,
    ReplayDivergence,
    Unconfirmed,
    UnknownSnapshot,
    WrongStage,
)
from spiraldev.orchestrator import Engine, Stage
from spiraldev.plan import TaskStatus
from spiraldev.provider import ScriptedProvider
from spiraldev.workspace import workspace_digest

from conftest import (
    GOAL,
    WALKTHROUGH,
    WALKTHROUGH_STEPS,
    run_walkthrough,
    walkthrough_provider,
)


def engine_through(step_count: int) -> Engine:
    engine = Engine(provider=walkthrough_provider())
    return run_walkthrough(engine, WALKTHROUGH_STEPS[:step_count])


def snapshot_of(engine: Engine):
    """Everything an operation is not allowed to touch on failure."""
    return (
        engine.state,
        len(engine.events),
        engine.store.head,
        tuple(s.id for s in engine.store.list()),
    )


class TestStageGates:
    def test_initial_stage(self):
        engine = Engine(provider=walkthrough_provider())
        assert engine.state.stage is Stage.DRAFTING
        assert engine.state.spec is None

    def test_empty_goal_rejected(self):
        engine = Engine(provider=walkthrough_provider())
        with pytest.raises(InvalidInput):
            engine.execute("start_session", {"goal": "   "})
        assert engine.events == []

    def test_unknown_verb_rejected(self):
        engine = Engine(provider=walkthrough_provider())
        with pytest.raises(InvalidInput):
            engine.execute("launch_rockets", {})

    def test_spec_review_before_start(self):
        engine = Engine(provider=walkthrough_provider())
        with pytest.raises(WrongStage):
            engine.execute("review_spec", {"action": "approve"})

    def test_double_start_rejected(self):
        engine = engine_through(1)
        with pytest.raises(WrongStage):
            engine.execute("start_session", {"goal": GOAL})

    def test_run_task_before_plan_approval(self):
        engine = engine_through(2)  # spec approved, plan under review
        assert engine.state.stage is Stage.PLAN_REVIEW
        with pytest.raises(WrongStage):
            engine.execute("run_task", {"task_id": "t1"})

    def test_plan_edits_blocked_while_drafting(self):
        engine = Engine(provider=walkthrough_provider())
        with pytest.raises(WrongStage):
            engine.execute("add_task", {"title": "x"})

    def test_every_stage_transition_in_walkthrough(self):
        engine = Engine(provider=walkthrough_provider())
        stages = [engine.state.stage]
        for verb, args in WALKTHROUGH_STEPS:
            engine.execute(verb, args)
            stages.append(engine.state.stage)
        assert stages[:4] == [Stage.DRAFTING, Stage.SPEC_REVIEW, Stage.PLAN_REVIEW, Stage.IDLE]
        assert stages[-1] is Stage.IDLE
        # run/resolve pairs alternate executing and idle for every task
        assert Stage.EXECUTING in stages


class TestSpecReview:
    def test_approve_writes_dataset_file(self):
        engine = engine_through(2)
        data = json.loads(engine.state.workspace["data.json"])
        assert isinstance(data, list) and len(data) >= 5
        assert engine.state.spec.approved

    def test_edit_replaces_text(self):
        engine = engine_through(1)
        engine.execute("review_spec", {"action": "edit", "text": "shorter spec\n"})
        assert engine.state.spec.specification == "shorter spec\n"
        assert engine.state.stage is Stage.SPEC_REVIEW
        assert not engine.state.spec.approved

    def test_edit_empty_rejected(self):
        engine = engine_through(1)
        with pytest.raises(InvalidInput):
            engine.execute("review_spec", {"action": "edit", "text": " "})

    def test_unknown_action(self):
        engine = engine_through(1)
        with pytest.raises(InvalidInput):
            engine.execute("review_spec", {"action": "ship_it"})


class TestTaskExecution:
    def test_run_not_next_task(self):
        engine = engine_through(3)
        before = snapshot_of(engine)
        with pytest.raises(NotNextTask):
            engine.execute("run_task", {"task_id": "t3"})
        assert snapshot_of(engine) == before

    def test_run_unknown_task(self):
        engine = engine_through(3)
        with pytest.raises(Exception):
            engine.execute("run_task", {"task_id": "t99"})

    def test_run_applies_snippets_and_awaits_approval(self):
        engine = engine_through(4)
        assert engine.state.stage is Stage.EXECUTING
        assert engine.state.plan.get("t1").status is TaskStatus.AWAITING_APPROVAL
        assert "index.html" in engine.state.workspace
        assert engine.state.pending.task_id == "t1"

    def test_second_run_while_active(self):
        engine = engine_through(4)
        with pytest.raises(ActiveTaskExists):
            engine.execute("run_task", {"task_id": "t2"})

    def test_approve_commits_snapshot(self):
        engine = engine_through(5)
        assert engine.state.stage is Stage.IDLE
        task = engine.state.plan.get("t1")
        assert task.status is TaskStatus.APPROVED
        assert task.snapshot_ref == 1
        assert engine.store.restore(1) == engine.state.workspace
        assert engine.state.pending is None

    def test_resolve_without_active_task(self):
        engine = engine_through(3)
        with pytest.raises(NoActiveTask):
            engine.execute("resolve_task", {"action": "approve"})

    def test_manual_override_normalizes_and_approves(self):
        engine = engine_through(4)
        engine.execute(
            "resolve_task",
            {"action": "manual_override", "files": {"notes.txt": "hand edit\r\nkept"}},
        )
        assert engine.state.workspace["notes.txt"] == "hand edit\nkept\n"
        assert engine.state.plan.get("t1").status is TaskStatus.APPROVED
        assert engine.store.restore(1)["notes.txt"] == "hand edit\nkept\n"

    def test_manual_override_unsafe_path(self):
        engine = engine_through(4)
        before = snapshot_of(engine)
        with pytest.raises(InvalidInput):
            engine.execute(
                "resolve_task",
                {"action": "manual_override", "files": {"../escape.txt": "x"}},
            )
        assert snapshot_of(engine) == before


class TestRedo:
    def redo_engine(self):
        """Walkthrough through t1 run, with a redo exchange spliced in."""
        fixture = json.loads(WALKTHROUGH.read_text())
        exchanges = fixture["exchanges"][:4]
        exchanges.append(
            {
                "kind": "redo",
                "match": "too plain",
                "response": {
                    "snippets": [
                        {
                            "id": "redo-1",
                            "rationale": "start over with a heading",
                            "anchor": {"kind": "create_file", "file": "index.html"},
                            "content": "<h1>Pick a restaurant</h1>\n",
                        }
                    ]
                },
            }
        )
        provider = ScriptedProvider(exchanges=exchanges)
        engine = Engine(provider=provider)
        return run_walkthrough(engine, WALKTHROUGH_STEPS[:4])

    def test_redo_reverts_then_reapplies(self):
        engine = self.redo_engine()
        engine.execute("resolve_task", {"action": "redo", "feedback": "too plain"})
        assert engine.state.workspace["index.html"] == "<h1>Pick a restaurant</h1>\n"
        assert engine.state.pending.feedback == ("too plain",)
        assert engine.state.plan.get("t1").status is TaskStatus.AWAITING_APPROVAL
        assert engine.state.stage is Stage.EXECUTING

    def test_redo_records_feedback_chain_in_request(self):
        engine = self.redo_engine()
        engine.execute("resolve_task", {"action": "redo", "feedback": "too plain"})
        # the redo request is replayed from the captured payloads on rebuild
        rebuilt = Engine.rebuild([e.to_doc() for e in engine.events])
        assert rebuilt.state.digest() == engine.state.digest()


class TestFailureIsolation:
    def broken_snippet_fixture(self):
        fixture = json.loads(WALKTHROUGH.read_text())
        exchanges = fixture["exchanges"][:3]
        exchanges.append(
            {
                "kind": "snippets",
                "response": {
                    "snippets": [
                        {
                            "id": "bad",
                            "anchor": {
                                "kind": "after_match",
                                "file": "index.html",
                                "match": "this line never existed",
                            },
                            "content": "x\n",
                        }
                    ]
                },
            }
        )
        return ScriptedProvider(exchanges=exchanges)

    def test_failed_batch_is_a_strict_no_op(self):
        engine = Engine(provider=self.broken_snippet_fixture())
        run_walkthrough(engine, WALKTHROUGH_STEPS[:3])
        before = snapshot_of(engine)
        revision = engine.state.plan.revision
        with pytest.raises(BatchFailed):
            engine.execute("run_task", {"task_id": "t1"})
        assert snapshot_of(engine) == before
        assert engine.state.plan.revision == revision
        assert engine.state.plan.get("t1").status is TaskStatus.PENDING

    def test_failed_batch_leaves_log_replayable(self):
        engine = Engine(provider=self.broken_snippet_fixture())
        run_walkthrough(engine, WALKTHROUGH_STEPS[:3])
        with pytest.raises(BatchFailed):
            engine.execute("run_task", {"task_id": "t1"})
        rebuilt = Engine.rebuild([e.to_doc() for e in engine.events])
        assert rebuilt.state.digest() == engine.state.digest()
        assert len(rebuilt.events) == 3


class TestRollback:
    def test_unconfirmed_is_a_no_op(self):
        engine = engine_through(13)  # five tasks approved
        before = snapshot_of(engine)
        with pytest.raises(Unconfirmed):
            engine.execute("rollback_to", {"snapshot_id": 3})
        assert snapshot_of(engine) == before

    def test_unknown_snapshot_beats_confirm_gate(self):
        engine = engine_through(13)
        with pytest.raises(UnknownSnapshot):
            engine.execute("rollback_to", {"snapshot_id": 99})

    def test_rollback_blocked_while_task_active(self):
        engine = engine_through(4)
        with pytest.raises(ActiveTaskExists):
            engine.execute("rollback_to", {"snapshot_id": 1, "confirm": True})

    def test_rollback_restores_and_marks_tasks(self):
        engine = engine_through(13)
        target = engine.store.restore(3)
        engine.execute("rollback_to", {"snapshot_id": 3, "confirm": True})
        assert engine.state.workspace == target
        statuses = [t.status for t in engine.state.plan.tasks]
        assert statuses == [
            TaskStatus.APPROVED,
            TaskStatus.APPROVED,
            TaskStatus.APPROVED,
            TaskStatus.ROLLED_BACK,
            TaskStatus.ROLLED_BACK,
        ]
        # rolled-back tasks keep their snapshot refs for the timeline
        assert engine.state.plan.get("t4").snapshot_ref == 4


class TestWalkthrough:
    def test_full_scenario_matches_golden_digests(self, walkthrough_engine, golden_digests):
        engine = walkthrough_engine
        assert engine.state.digest() == golden_digests["final"]
        assert len(engine.events) == len(WALKTHROUGH_STEPS)
        for task in engine.state.plan.tasks:
            expected = golden_digests["per_task"].get(task.id.lstrip("t"))
            if expected is None:  # t8's tree is the final digest itself
                continue
            assert workspace_digest(engine.store.restore(task.snapshot_ref)) == expected

    def test_rollback_point_matches_golden_tree(self, walkthrough_engine, golden_digests):
        restored = walkthrough_engine.store.restore(6)
        assert workspace_digest(restored) == golden_digests["snapshot6"]

    def test_final_plan_shape(self, walkthrough_engine):
        plan = walkthrough_engine.state.plan
        rows = [(t.id, t.status, t.snapshot_ref) for t in plan.tasks]
        assert rows[:6] == [
            (f"t{i}", TaskStatus.APPROVED, i) for i in range(1, 7)
        ]
        assert rows[6] == ("t7", TaskStatus.ROLLED_BACK, 7)
        assert rows[7] == ("t8", TaskStatus.APPROVED, 8)


class TestRebuild:
    def test_rebuild_from_recorded_payloads(self, walkthrough_engine):
        docs = [e.to_doc() for e in walkthrough_engine.events]
        rebuilt = Engine.rebuild(docs)
        assert rebuilt.state.digest() == walkthrough_engine.state.digest()
        assert rebuilt.session_doc() == walkthrough_engine.session_doc()

    def test_rebuild_empty_log(self):
        engine = Engine.rebuild([])
        assert engine.state.stage is Stage.DRAFTING and engine.events == []

    def test_verify_against_fixture(self, walkthrough_engine):
        docs = [e.to_doc() for e in walkthrough_engine.events]
        rebuilt = Engine.rebuild(docs, provider=walkthrough_provider(), strict_fixture=True)
        assert rebuilt.state.digest() == walkthrough_engine.state.digest()

    def test_mutated_fixture_diverges_at_first_affected_event(self, walkthrough_engine):
        docs = [e.to_doc() for e in walkthrough_engine.events]
        fixture = json.loads(WALKTHROUGH.read_text())
        mutated = copy.deepcopy(fixture["exchanges"])
        # exchange 4 is task 1; its first event is seq 4 in the log
        mutated[3]["response"]["snippets"][0]["content"] = "<!-- drifted -->\n"
        provider = ScriptedProvider(exchanges=mutated)
        with pytest.raises(ReplayDivergence) as exc:
            Engine.rebuild(docs, provider=provider, strict_fixture=True)
        assert exc.value.sequence == 4

    def test_tampered_digest_detected(self, walkthrough_engine):
        docs = [e.to_doc() for e in walkthrough_engine.events]
        docs[7] = dict(docs[7], digest="0" * 64)
        with pytest.raises(CorruptProject):
            Engine.rebuild(docs)

    def test_sequence_gap_detected(self, walkthrough_engine):
        docs = [e.to_doc() for e in walkthrough_engine.events]
        del docs[5]
        with pytest.raises(CorruptProject):
            Engine.rebuild(docs)


class TestEventLog:
    def test_events_carry_consumed_payloads(self, walkthrough_engine):
        events = walkthrough_engine.events
        assert len(events[0].gen) == 2  # spec and data
        assert len(events[1].gen) == 1  # plan
        assert events[2].gen == ()  # plan approval needs no generation
        assert all(e.seq == i + 1 for i, e in enumerate(events))

    def test_digests_are_cumulative_not_constant(self, walkthrough_engine):
        digests = [e.digest for e in walkthrough_engine.events]
        assert len(set(digests)) > 5
