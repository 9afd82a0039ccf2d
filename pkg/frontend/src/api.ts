/**
 * Typed client for the session API. One method per endpoint; every
 * mutating call returns the fresh session document so callers never
 * have to guess at state.
 */

export interface AnchorDoc {
    kind: string;
    file: string;
    match?: string;
    line?: number;
    occurrence?: number;
}

export interface SnippetDoc {
    id: string;
    rationale?: string;
    anchor: AnchorDoc;
    content: string;
}

export interface InjectionResultDoc {
    snippet_id: string;
    file: string;
    inserted_span: [number, number]; // 1-based first line, line count
    inverse: unknown;
}

export interface PendingBatchDoc {
    task_id: string;
    snippets: SnippetDoc[];
    results: InjectionResultDoc[];
    feedback: string[];
}

export interface TaskDoc {
    id: string;
    ordinal: number;
    title: string;
    description: string;
    status: 'pending' | 'generating' | 'awaiting_approval' | 'approved' | 'rolled_back';
    origin: string;
    snapshot_ref: number | null;
}

export interface PlanDoc {
    revision: number;
    tasks: TaskDoc[];
}

export interface SpecDoc {
    goal: string;
    specification: string;
    dataset: Record<string, unknown>[];
    approved: boolean;
}

export interface SnapshotSummaryDoc {
    id: number;
    task_id: string;
    file_count: number;
    superseded: boolean;
}

export interface SessionDoc {
    stage: 'drafting' | 'spec_review' | 'plan_review' | 'executing' | 'idle';
    spec: SpecDoc | null;
    plan: PlanDoc | null;
    pending: PendingBatchDoc | null;
    snapshots: SnapshotSummaryDoc[];
    head: number | null;
    last_seq: number;
}

export interface EventDoc {
    seq: number;
    ts: number;
    verb: string;
    args: Record<string, unknown>;
    gen: unknown[];
    digest: string;
}

export class ApiError extends Error {
    constructor(
        public readonly name: string,
        public readonly detail: string,
        public readonly status: number,
    ) {
        super(`${name}: ${detail}`);
    }
}

export class ApiClient {
    constructor(private readonly base: string = '') {}

    private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
        const init: RequestInit = { method };
        if (body !== undefined) {
            init.headers = { 'Content-Type': 'application/json' };
            init.body = JSON.stringify(body);
        }
        const response = await fetch(this.base + path, init);
        if (!response.ok) {
            let name = `HTTP ${response.status}`;
            let detail = '';
            try {
                const doc = await response.json();
                if (doc && doc.error) {
                    name = doc.error;
                    detail = doc.detail ?? '';
                }
            } catch {
                // non-JSON error body; keep the status line
            }
            throw new ApiError(name, detail, response.status);
        }
        return response.json() as Promise<T>;
    }

    getSession(): Promise<SessionDoc> {
        return this.call('GET', '/api/session');
    }

    startProject(goal: string): Promise<SessionDoc> {
        return this.call('POST', '/api/projects', { goal });
    }

    reviewSpec(body: { action: string; text?: string; feedback?: string }): Promise<SessionDoc> {
        return this.call('POST', '/api/spec/review', body);
    }

    reviewPlan(body: { action: string }): Promise<SessionDoc> {
        return this.call('POST', '/api/plan/review', body);
    }

    addTask(title: string, description = '', position?: number): Promise<SessionDoc> {
        const body: Record<string, unknown> = { title, description };
        if (position !== undefined) body.position = position;
        return this.call('POST', '/api/plan/tasks', body);
    }

    updateTask(taskId: string, title: string, description = ''): Promise<SessionDoc> {
        return this.call('PATCH', `/api/plan/tasks/${taskId}`, { title, description });
    }

    removeTask(taskId: string): Promise<SessionDoc> {
        return this.call('DELETE', `/api/plan/tasks/${taskId}`);
    }

    runTask(taskId: string): Promise<SessionDoc> {
        return this.call('POST', `/api/tasks/${taskId}/run`);
    }

    resolveTask(
        taskId: string,
        body: { action: string; feedback?: string; files?: Record<string, string> },
    ): Promise<SessionDoc> {
        return this.call('POST', `/api/tasks/${taskId}/resolve`, body);
    }

    rollback(snapshotId: number, confirm: boolean): Promise<SessionDoc> {
        return this.call('POST', '/api/rollback', { snapshot_id: snapshotId, confirm });
    }

    listSnapshots(): Promise<{ snapshots: SnapshotSummaryDoc[]; head: number | null }> {
        return this.call('GET', '/api/snapshots');
    }

    events(after: number, wait = 0): Promise<{ events: EventDoc[]; last_seq: number }> {
        return this.call('GET', `/api/events?after=${after}&wait=${wait}`);
    }

    async previewText(path: string): Promise<string> {
        const response = await fetch(`${this.base}/preview/${path}`);
        if (!response.ok) throw new ApiError(`HTTP ${response.status}`, path, response.status);
        return response.text();
    }

    async snapshotFileText(snapshotId: number, path: string): Promise<string> {
        const response = await fetch(`${this.base}/api/snapshots/${snapshotId}/files/${path}`);
        if (!response.ok) throw new ApiError(`HTTP ${response.status}`, path, response.status);
        return response.text();
    }
}
