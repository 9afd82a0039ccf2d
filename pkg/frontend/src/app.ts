/**
 * Single-page steering surface. The server is the only source of truth:
 * every render starts from the latest GET /session document, and a
 * long-poll on /api/events triggers a refresh whenever the log grows.
 * At most one mutation is in flight; buttons disable while it runs.
 */

import { ApiClient, ApiError, SessionDoc } from './api.js';
import {
    buildBatchViews,
    buildTimeline,
    nextPendingTask,
    redoFeedbackValid,
    stageActions,
    stageLabel,
    touchedFiles,
} from './model.js';

const api = new ApiClient('');

let session: SessionDoc | null = null;
let lastError = '';
let busy = false;

const root = () => document.getElementById('app') as HTMLElement;

function esc(text: string): string {
    const div = document.createElement('div');
    div.textContent = text;
    return div.innerHTML;
}

async function mutate(action: () => Promise<SessionDoc>): Promise<void> {
    if (busy) return;
    busy = true;
    lastError = '';
    render();
    try {
        session = await action();
    } catch (err) {
        // engine errors are shown verbatim: "Name: detail"
        lastError = err instanceof ApiError ? err.message : String(err);
    } finally {
        busy = false;
    }
    await render();
}

function button(label: string, id: string, enabled: boolean): string {
    const dis = enabled && !busy ? '' : ' disabled';
    return `<button id="${id}"${dis}>${esc(label)}</button>`;
}

function bind(id: string, handler: () => void): void {
    const el = document.getElementById(id);
    if (el) el.addEventListener('click', handler);
}

function goalScreen(): string {
    return `<section class="card">
  <h2>${esc(stageLabel('drafting'))}</h2>
  <p>Describe the prototype you want; a specification, a synthetic dataset, and a task plan follow.</p>
  <textarea id="goal-input" rows="3" placeholder="e.g. a card-swiping restaurant picker"></textarea>
  ${button('Generate specification', 'goal-submit', true)}
</section>`;
}

function specScreen(s: SessionDoc): string {
    const spec = s.spec!;
    return `<section class="card">
  <h2>${esc(stageLabel('spec_review'))}</h2>
  <textarea id="spec-text" rows="14">${esc(spec.specification)}</textarea>
  <p class="hint">${spec.dataset.length} synthetic records generated.</p>
  <div class="row">
    ${button('Approve', 'spec-approve', true)}
    ${button('Save edit', 'spec-edit', true)}
    ${button('Regenerate', 'spec-regen', true)}
    <input id="spec-feedback" placeholder="feedback for regeneration">
  </div>
</section>`;
}

function planList(s: SessionDoc, editable: boolean): string {
    const rows = s.plan!.tasks
        .map((t) => {
            const ref = t.snapshot_ref ? ` <span class="ref">snapshot ${t.snapshot_ref}</span>` : '';
            const controls =
                editable && t.status === 'pending'
                    ? ` <button class="task-remove" data-id="${t.id}">remove</button>`
                    : '';
            return `<li class="status-${t.status}" data-id="${t.id}">
  <span class="ordinal">${t.ordinal}.</span>
  <span class="title">${esc(t.title)}</span>
  <span class="status">${t.status.replace('_', ' ')}</span>${ref}${controls}
</li>`;
        })
        .join('\n');
    return `<ol class="plan">${rows}</ol>`;
}

function planScreen(s: SessionDoc): string {
    return `<section class="card">
  <h2>${esc(stageLabel('plan_review'))}</h2>
  ${planList(s, true)}
  <div class="row">
    <input id="add-title" placeholder="new task title">
    ${button('Add task', 'plan-add', true)}
  </div>
  <div class="row">
    ${button('Approve plan', 'plan-approve', true)}
    ${button('Regenerate plan', 'plan-regen', true)}
  </div>
</section>`;
}

async function taskScreen(s: SessionDoc): Promise<string> {
    const pending = s.pending!;
    const task = s.plan!.tasks.find((t) => t.id === pending.task_id)!;
    const texts: Record<string, string> = {};
    for (const file of touchedFiles(pending)) {
        texts[file] = await api.previewText(file);
    }
    const views = buildBatchViews(pending, texts)
        .map((view) => {
            const body = view.lines
                .map(
                    (line) =>
                        `<div class="line${line.inserted ? ' inserted' : ''}">` +
                        `<span class="num">${line.num}</span>${esc(line.text) || '&nbsp;'}</div>`,
                )
                .join('');
            const above = view.hiddenAbove ? `<div class="elide">… ${view.hiddenAbove} lines</div>` : '';
            const below = view.hiddenBelow ? `<div class="elide">… ${view.hiddenBelow} lines</div>` : '';
            const tag = view.isNewFile ? ' <span class="new-file">new file</span>' : '';
            return `<div class="snippet">
  <h4>${esc(view.file)}${tag}</h4>
  ${view.rationale ? `<p class="rationale">${esc(view.rationale)}</p>` : ''}
  <pre class="code">${above}${body}${below}</pre>
</div>`;
        })
        .join('\n');
    return `<section class="card">
  <h2>Task ${task.ordinal}: ${esc(task.title)}</h2>
  ${views}
  <div class="row">
    ${button('Approve', 'task-approve', true)}
    ${button('Redo', 'task-redo', true)}
    <input id="redo-feedback" placeholder="what should change? (required for redo)">
  </div>
</section>`;
}

function idleScreen(s: SessionDoc): string {
    const next = nextPendingTask(s.plan);
    const runLabel = next ? `Run task ${next.ordinal}: ${next.title}` : 'All tasks done';
    return `<section class="card">
  <h2>${esc(stageLabel('idle'))}</h2>
  ${planList(s, true)}
  <div class="row">
    <input id="add-title" placeholder="new task title">
    ${button('Add task', 'plan-add', true)}
  </div>
  ${button(runLabel, 'task-run', next !== null)}
</section>`;
}

function timelineSection(s: SessionDoc): string {
    const actions = stageActions(s);
    const rows = buildTimeline(s.snapshots, s.plan, s.head)
        .map((row) => {
            const classes = [row.superseded ? 'superseded' : '', row.isHead ? 'head' : '']
                .filter(Boolean)
                .join(' ');
            const back = button(`Roll back`, `rollback-${row.id}`, actions.rollback && !row.isHead);
            return `<li class="${classes}">#${row.id} ${esc(row.taskTitle)} (${row.fileCount} files)` +
                `${row.isHead ? ' &larr; head' : ''} ${back}</li>`;
        })
        .join('\n');
    return rows ? `<section class="card"><h3>Timeline</h3><ul class="timeline">${rows}</ul></section>` : '';
}

function previewSection(s: SessionDoc): string {
    // last_seq busts the iframe cache after every state change
    return `<section class="card preview">
  <h3>Live preview</h3>
  <iframe id="preview-frame" src="/preview/index.html?v=${s.last_seq}"></iframe>
</section>`;
}

async function render(): Promise<void> {
    const el = root();
    if (!session) {
        el.innerHTML = '<p>Loading…</p>';
        return;
    }
    const s = session;
    let screen: string;
    switch (s.stage) {
        case 'drafting':
            screen = goalScreen();
            break;
        case 'spec_review':
            screen = specScreen(s);
            break;
        case 'plan_review':
            screen = planScreen(s);
            break;
        case 'executing':
            screen = await taskScreen(s);
            break;
        case 'idle':
            screen = idleScreen(s);
            break;
    }
    const error = lastError ? `<div class="error">${esc(lastError)}</div>` : '';
    const hasFiles = s.snapshots.length > 0 || s.stage === 'executing';
    el.innerHTML = `<header><h1>spiraldev</h1><span class="stage">${s.stage}</span></header>
${error}
<main>
  <div class="left">${screen}${timelineSection(s)}</div>
  <div class="right">${hasFiles ? previewSection(s) : ''}</div>
</main>`;
    wire(s);
}

function wire(s: SessionDoc): void {
    bind('goal-submit', () => {
        const goal = (document.getElementById('goal-input') as HTMLTextAreaElement).value;
        void mutate(() => api.startProject(goal));
    });
    bind('spec-approve', () => void mutate(() => api.reviewSpec({ action: 'approve' })));
    bind('spec-edit', () => {
        const text = (document.getElementById('spec-text') as HTMLTextAreaElement).value;
        void mutate(() => api.reviewSpec({ action: 'edit', text }));
    });
    bind('spec-regen', () => {
        const feedback = (document.getElementById('spec-feedback') as HTMLInputElement).value;
        void mutate(() => api.reviewSpec({ action: 'regenerate', feedback }));
    });
    bind('plan-approve', () => void mutate(() => api.reviewPlan({ action: 'approve' })));
    bind('plan-regen', () => void mutate(() => api.reviewPlan({ action: 'regenerate' })));
    bind('plan-add', () => {
        const title = (document.getElementById('add-title') as HTMLInputElement).value;
        if (!title.trim()) return;
        void mutate(() => api.addTask(title.trim()));
    });
    for (const el of Array.from(document.querySelectorAll('.task-remove'))) {
        el.addEventListener('click', () => {
            const id = (el as HTMLElement).dataset.id!;
            void mutate(() => api.removeTask(id));
        });
    }
    bind('task-run', () => {
        const next = nextPendingTask(s.plan);
        if (next) void mutate(() => api.runTask(next.id));
    });
    bind('task-approve', () => {
        const id = s.pending!.task_id;
        void mutate(() => api.resolveTask(id, { action: 'approve' }));
    });
    bind('task-redo', () => {
        const feedback = (document.getElementById('redo-feedback') as HTMLInputElement).value;
        if (!redoFeedbackValid(feedback)) {
            lastError = 'Redo needs feedback: say what should change.';
            void render();
            return;
        }
        const id = s.pending!.task_id;
        void mutate(() => api.resolveTask(id, { action: 'redo', feedback }));
    });
    for (const row of buildTimeline(s.snapshots, s.plan, s.head)) {
        bind(`rollback-${row.id}`, () => {
            const ok = window.confirm(
                `Roll back to snapshot #${row.id}? Later approved tasks will be marked rolled back.`,
            );
            if (ok) void mutate(() => api.rollback(row.id, true));
        });
    }
}

async function watchEvents(): Promise<void> {
    // long-poll; any new event means the session document changed
    for (;;) {
        const after = session?.last_seq ?? 0;
        try {
            const batch = await api.events(after, 25);
            if (batch.last_seq > after && !busy) {
                session = await api.getSession();
                await render();
            }
        } catch {
            await new Promise((resolve) => setTimeout(resolve, 2000));
        }
    }
}

async function boot(): Promise<void> {
    session = await api.getSession();
    await render();
    void watchEvents();
}

document.addEventListener('DOMContentLoaded', () => void boot());
