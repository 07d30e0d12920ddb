// Typed client for the audit service. Every dashboard number flows
// through here; nothing is computed client-side.

import type {
  ApiError,
  DatasetPayload,
  InferencePayload,
  ModelProfile,
  PlotData,
  RiskProfile,
  SectorPolicy,
  SessionState,
  SurveyItem,
  ThresholdSpec,
  Verdict,
} from './types.js';

export class ApiRequestError extends Error {
  code: string;
  status: number;
  details?: unknown;

  constructor(status: number, body: ApiError) {
    super(body.message || `request failed with status ${status}`);
    this.code = body.code || 'UNKNOWN';
    this.status = status;
    this.details = body.details;
  }
}

async function parseError(resp: Response): Promise<never> {
  let body: ApiError = { code: 'UNKNOWN', message: `HTTP ${resp.status}` };
  try {
    body = (await resp.json()) as ApiError;
  } catch {
    // non-JSON error body; keep the fallback
  }
  throw new ApiRequestError(resp.status, body);
}

export class ApiClient {
  constructor(public baseUrl: string = '') {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.url(path));
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  private async sendJson<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.url(path), {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  createSession(): Promise<SessionState> {
    return this.sendJson('POST', '/sessions');
  }

  getSession(id: string): Promise<SessionState> {
    return this.getJson(`/sessions/${id}`);
  }

  questionBank(): Promise<SurveyItem[]> {
    return this.getJson('/question-bank');
  }

  submitSurvey(id: string, responses: { item_id: string; rating: number }[]): Promise<RiskProfile> {
    return this.sendJson('PUT', `/sessions/${id}/survey`, { responses });
  }

  submitConfig(
    id: string,
    modelProfile: ModelProfile,
    sectorPolicy: SectorPolicy,
  ): Promise<ThresholdSpec> {
    return this.sendJson('PUT', `/sessions/${id}/config`, {
      model_profile: modelProfile,
      sector_policy: sectorPolicy,
    });
  }

  async uploadDataset(
    id: string,
    file: Blob,
    filename: string,
    schema: unknown,
    proxyThreshold?: number,
  ): Promise<DatasetPayload> {
    const form = new FormData();
    form.append('file', file, filename);
    form.append('schema', JSON.stringify(schema));
    if (proxyThreshold !== undefined) {
      form.append('proxy_threshold', String(proxyThreshold));
    }
    const resp = await fetch(this.url(`/sessions/${id}/dataset`), {
      method: 'POST',
      body: form,
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as DatasetPayload;
  }

  evaluate(
    id: string,
    options: { seed: number; replicates?: number; level?: number; with_ci?: boolean },
  ): Promise<InferencePayload> {
    return this.sendJson('POST', `/sessions/${id}/evaluate`, options);
  }

  score(id: string, biMetrics?: string[]): Promise<Verdict> {
    const body = biMetrics ? { bi_metrics: biMetrics } : {};
    return this.sendJson('POST', `/sessions/${id}/score`, body);
  }

  async report(id: string, format: 'json' | 'markdown' | 'html'): Promise<Blob> {
    const resp = await fetch(this.url(`/sessions/${id}/report?format=${format}`));
    if (!resp.ok) await parseError(resp);
    return resp.blob();
  }

  async reportJson(id: string): Promise<Record<string, any>> {
    const resp = await fetch(this.url(`/sessions/${id}/report?format=json`));
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as Record<string, any>;
  }

  plot(id: string, kind: string): Promise<PlotData> {
    return this.getJson(`/sessions/${id}/plots/${kind}`);
  }

  async checkpoint(id: string): Promise<Blob> {
    const resp = await fetch(this.url(`/sessions/${id}/checkpoint`));
    if (!resp.ok) await parseError(resp);
    return resp.blob();
  }
}
