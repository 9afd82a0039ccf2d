/**
 * End-to-end walkthrough against the real backend. Spawns the Python
 * server with the scripted fixture and drives the session exactly as the
 * UI buttons do (one API call per action), checking the preview and the
 * final workspace digest against the committed golden values.
 */

import { ChildProcess, spawn } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, resolve } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient, ApiError, SessionDoc } from '../src/api';
import { nextPendingTask } from '../src/model';

const REPO = resolve(__dirname, '..', '..');
const FIXTURE = join(REPO, 'fixtures', 'walkthrough.json');
const GOLDEN = JSON.parse(
    readFileSync(join(REPO, 'tests', 'data', 'golden', 'digests.json'), 'utf-8'),
);
const GOAL =
    'Visualize Yelp restaurants as a card-swiping UI to help users choose where to eat';

const PORT = 8500 + (process.pid % 400);
const BOOT_SCRIPT = `
import sys
from spiraldev.project import Project
from spiraldev.server import serve
project = Project.create(sys.argv[1], provider_spec="scripted:" + sys.argv[2])
serve(project, port=int(sys.argv[3]))
`;

let server: ChildProcess;
let projectDir: string;
const api = new ApiClient(`http://127.0.0.1:${PORT}`);

async function waitForServer(): Promise<void> {
    for (let attempt = 0; attempt < 100; attempt++) {
        try {
            await api.getSession();
            return;
        } catch {
            await new Promise((r) => setTimeout(r, 100));
        }
    }
    throw new Error('backend did not come up');
}

/** A browser reload mid-session must reconstruct the same document. */
async function assertReloadStable(doc: SessionDoc): Promise<void> {
    expect(await api.getSession()).toEqual(doc);
}

beforeAll(async () => {
    projectDir = mkdtempSync(join(tmpdir(), 'spiraldev-e2e-'));
    server = spawn('python3', ['-c', BOOT_SCRIPT, join(projectDir, 'proj'), FIXTURE, String(PORT)], {
        stdio: ['ignore', 'inherit', 'inherit'],
    });
    await waitForServer();
}, 30000);

afterAll(() => {
    server?.kill();
    rmSync(projectDir, { recursive: true, force: true });
});

describe('golden walkthrough through the UI client', () => {
    it('reaches the committed final digest', async () => {
        let doc = await api.startProject(GOAL);
        expect(doc.stage).toBe('spec_review');
        await assertReloadStable(doc);

        doc = await api.reviewSpec({ action: 'approve' });
        expect(doc.stage).toBe('plan_review');
        expect(doc.plan!.tasks).toHaveLength(5);

        doc = await api.reviewPlan({ action: 'approve' });
        expect(doc.stage).toBe('idle');

        // tasks 1-5: run the next pending task, review, approve
        for (let i = 1; i <= 5; i++) {
            const next = nextPendingTask(doc.plan)!;
            expect(next.id).toBe(`t${i}`);
            doc = await api.runTask(next.id);
            expect(doc.stage).toBe('executing');
            expect(doc.pending!.results.length).toBeGreaterThan(0);
            await assertReloadStable(doc);
            doc = await api.resolveTask(next.id, { action: 'approve' });
            expect(doc.stage).toBe('idle');
            expect(doc.head).toBe(i);
            // the preview serves the approved workspace
            const preview = await api.previewText('index.html');
            expect(preview).toBe(await api.snapshotFileText(i, 'index.html'));
        }

        // two adaptive tasks discovered during use
        doc = await api.addTask(
            'Implement search in the bookmarks tab',
            'Filter the bookmark list as the user types.',
        );
        doc = await api.runTask('t6');
        doc = await api.resolveTask('t6', { action: 'approve' });
        doc = await api.addTask(
            'Mark bookmarked restaurants as visited',
            'Visited toggle on each bookmark entry.',
        );
        doc = await api.runTask('t7');
        doc = await api.resolveTask('t7', { action: 'approve' });
        expect(doc.head).toBe(7);

        // change of direction: roll back to snapshot 6 and replace the feature
        doc = await api.rollback(6, true);
        expect(doc.head).toBe(6);
        expect(doc.plan!.tasks.find((t) => t.id === 't7')!.status).toBe('rolled_back');
        expect(await api.previewText('app.js')).toBe(await api.snapshotFileText(6, 'app.js'));
        await assertReloadStable(doc);

        doc = await api.addTask(
            'Mark any restaurant as visited',
            'Visited toggle on every card plus a visited panel.',
        );
        doc = await api.runTask('t8');
        doc = await api.resolveTask('t8', { action: 'approve' });
        expect(doc.stage).toBe('idle');

        const { events } = await api.events(0);
        expect(events).toHaveLength(23);
        expect(events[events.length - 1].digest).toBe(GOLDEN.final);
        const rollbackEvent = events.find((e) => e.verb === 'rollback_to')!;
        expect(rollbackEvent.digest).toBe(GOLDEN.snapshot6);
    }, 30000);

    it('renders engine errors verbatim and leaves state untouched', async () => {
        const before = await api.getSession();
        const err = await api.reviewPlan({ action: 'approve' }).catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.name).toBe('WrongStage');
        expect(err.status).toBe(409);
        expect(err.message).toMatch(/^WrongStage: /);
        expect(await api.getSession()).toEqual(before);
    });

    it('unconfirmed rollback is refused', async () => {
        const err = await api.rollback(3, false).catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.name).toBe('Unconfirmed');
    });

    it('preview sends no-store headers', async () => {
        const response = await fetch(`http://127.0.0.1:${PORT}/preview/index.html`);
        expect(response.headers.get('cache-control')).toContain('no-store');
    });
});
