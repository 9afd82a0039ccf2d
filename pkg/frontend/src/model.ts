/**
 * Pure view-model logic: everything here is a function of API documents,
 * so the whole UI can be reconstructed from GET /session at any moment.
 */

import type {
    InjectionResultDoc,
    PendingBatchDoc,
    PlanDoc,
    SessionDoc,
    SnapshotSummaryDoc,
    TaskDoc,
} from './api.js';

export const CONTEXT_LINES = 5;

export interface ViewLine {
    num: number; // 1-based line number in the file as it stands now
    text: string;
    inserted: boolean;
}

export interface InsertionView {
    file: string;
    snippetId: string;
    rationale: string;
    lines: ViewLine[];
    hiddenAbove: number; // lines elided before the context window
    hiddenBelow: number;
    isNewFile: boolean;
}

function splitLines(text: string): string[] {
    const lines = text.split('\n');
    if (lines[lines.length - 1] === '') lines.pop(); // trailing newline
    return lines;
}

/** Slice one file around an inserted span, flagging the insertion. */
export function buildInsertionView(
    fileText: string,
    result: InjectionResultDoc,
    rationale = '',
    context = CONTEXT_LINES,
): InsertionView {
    const lines = splitLines(fileText);
    const [start, count] = result.inserted_span;
    const first = Math.max(1, start - context);
    const last = Math.min(lines.length, start + count - 1 + context);
    const view: ViewLine[] = [];
    for (let num = first; num <= last; num++) {
        view.push({
            num,
            text: lines[num - 1] ?? '',
            inserted: num >= start && num < start + count,
        });
    }
    return {
        file: result.file,
        snippetId: result.snippet_id,
        rationale,
        lines: view,
        hiddenAbove: first - 1,
        hiddenBelow: Math.max(0, lines.length - last),
        isNewFile: count >= lines.length && start === 1,
    };
}

/** One view per applied snippet, in application order. */
export function buildBatchViews(
    pending: PendingBatchDoc,
    fileTexts: Record<string, string>,
): InsertionView[] {
    const rationaleById = new Map(
        pending.snippets.map((s) => [s.id, s.rationale ?? '']),
    );
    return pending.results.map((result) =>
        buildInsertionView(
            fileTexts[result.file] ?? '',
            result,
            rationaleById.get(result.snippet_id) ?? '',
        ),
    );
}

export interface Actions {
    startProject: boolean;
    reviewSpec: boolean;
    reviewPlan: boolean;
    editPlan: boolean; // add / edit / remove pending tasks
    runTask: boolean;
    resolveTask: boolean;
    rollback: boolean;
}

/** Which buttons are enabled; disabled actions stay visible but inert. */
export function stageActions(session: SessionDoc): Actions {
    const stage = session.stage;
    return {
        startProject: stage === 'drafting',
        reviewSpec: stage === 'spec_review',
        reviewPlan: stage === 'plan_review',
        editPlan: stage === 'plan_review' || stage === 'idle' || stage === 'executing',
        runTask: stage === 'idle' && nextPendingTask(session.plan) !== null,
        resolveTask: stage === 'executing' && session.pending !== null,
        rollback: stage === 'idle' && session.snapshots.length > 0,
    };
}

export function nextPendingTask(plan: PlanDoc | null): TaskDoc | null {
    if (!plan) return null;
    return plan.tasks.find((t) => t.status === 'pending') ?? null;
}

/** Redo must carry a reason; blocked client-side before any request. */
export function redoFeedbackValid(feedback: string): boolean {
    return feedback.trim().length > 0;
}

export interface TimelineRow {
    id: number;
    taskId: string;
    taskTitle: string;
    fileCount: number;
    superseded: boolean;
    isHead: boolean;
}

export function buildTimeline(
    snapshots: SnapshotSummaryDoc[],
    plan: PlanDoc | null,
    head: number | null,
): TimelineRow[] {
    const titleByTask = new Map(
        (plan?.tasks ?? []).map((t) => [t.id, t.title]),
    );
    return snapshots.map((s) => ({
        id: s.id,
        taskId: s.task_id,
        taskTitle: titleByTask.get(s.task_id) ?? '',
        fileCount: s.file_count,
        superseded: s.superseded,
        isHead: s.id === head,
    }));
}

/** Files the pending batch touched, deduplicated in first-touch order. */
export function touchedFiles(pending: PendingBatchDoc): string[] {
    const seen: string[] = [];
    for (const result of pending.results) {
        if (!seen.includes(result.file)) seen.push(result.file);
    }
    return seen;
}

export function stageLabel(stage: SessionDoc['stage']): string {
    switch (stage) {
        case 'drafting':
            return 'Describe your idea';
        case 'spec_review':
            return 'Review the specification';
        case 'plan_review':
            return 'Review the plan';
        case 'executing':
            return 'Review the change';
        case 'idle':
            return 'Ready for the next task';
    }
}
