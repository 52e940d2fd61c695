import type {
  Api,
  Candidate,
  Completeness,
  Entity,
  ExportResult,
  JobStatus,
  ModelCard,
  RulesDoc,
  SessionDoc,
  Template,
} from './types.js';

export class ApiError extends Error {
  constructor(
    message: string,
    readonly code: string,
    readonly status: number,
    readonly detail: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client for the mathdoc service. */
export class ApiClient implements Api {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body instanceof FormData) {
      init.body = body;
    } else if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { 'content-type': 'application/json' };
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let payload: { code?: string; message?: string; detail?: Record<string, unknown> } = {};
      try {
        payload = await response.json();
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(
        payload.message ?? `request failed with status ${response.status}`,
        payload.code ?? 'http_error',
        response.status,
        payload.detail ?? {},
      );
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ name: string; version: string }> {
    return this.request('GET', '/api/health');
  }

  template(): Promise<Template> {
    return this.request('GET', '/api/template');
  }

  newSession(): Promise<{ session_id: string; session: SessionDoc }> {
    return this.request('POST', '/api/sessions');
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.request('GET', `/api/sessions/${encodeURIComponent(id)}`);
  }

  setAnswer(id: string, qid: string, value: unknown): Promise<SessionDoc> {
    return this.request(
      'PUT',
      `/api/sessions/${encodeURIComponent(id)}/answers/${encodeURIComponent(qid)}`,
      { value },
    );
  }

  suggest(id: string, qid: string, text?: string): Promise<Candidate[]> {
    const query = text ? `?q=${encodeURIComponent(text)}` : '';
    return this.request<{ candidates: Candidate[] }>(
      'GET',
      `/api/sessions/${encodeURIComponent(id)}/suggest/${encodeURIComponent(qid)}${query}`,
    ).then((r) => r.candidates);
  }

  completeness(id: string): Promise<Completeness> {
    return this.request('GET', `/api/sessions/${encodeURIComponent(id)}/completeness`);
  }

  exportSession(id: string, policy = 'reuse'): Promise<ExportResult> {
    return this.request('POST', `/api/sessions/${encodeURIComponent(id)}/export`, {
      dedup_policy: policy,
    });
  }

  wiki(id: string, force = false): Promise<{ title: string; markdown: string }> {
    const query = force ? '?force=true' : '';
    return this.request('GET', `/api/sessions/${encodeURIComponent(id)}/wiki${query}`);
  }

  attachRules(id: string, jobId: string): Promise<SessionDoc> {
    return this.request('PUT', `/api/sessions/${encodeURIComponent(id)}/artifacts/rules`, {
      job_id: jobId,
    });
  }

  kgFind(params: { kind?: string; q?: string }): Promise<Entity[]> {
    const query = new URLSearchParams();
    if (params.kind) query.set('kind', params.kind);
    if (params.q) query.set('q', params.q);
    const suffix = query.toString() ? `?${query.toString()}` : '';
    return this.request<{ entities: Entity[] }>('GET', `/api/kg/entities${suffix}`).then(
      (r) => r.entities,
    );
  }

  kgEntity(id: string): Promise<Entity> {
    return this.request('GET', `/api/kg/entities/${encodeURIComponent(id)}`);
  }

  kgCard(id: string): Promise<ModelCard> {
    return this.request('GET', `/api/kg/entities/${encodeURIComponent(id)}/card`);
  }

  kgExportUrl(format: 'json' | 'triples' = 'json'): string {
    return `${this.baseUrl}/api/kg/export?format=${format}`;
  }

  async submitJob(file: Blob, filename: string, order = 'degrevlex'): Promise<string> {
    const form = new FormData();
    form.append('file', file, filename);
    form.append('order', order);
    const created = await this.request<{ job_id: string }>('POST', '/api/analysis/jobs', form);
    return created.job_id;
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.request('GET', `/api/analysis/jobs/${encodeURIComponent(jobId)}`);
  }

  jobRules(jobId: string): Promise<RulesDoc> {
    return this.request('GET', `/api/analysis/jobs/${encodeURIComponent(jobId)}/rules`);
  }
}
