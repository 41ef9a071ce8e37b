// Thin typed client for the annotation service. The transport is injected
// so view logic can be exercised against a scripted fake in tests.

import type {
  CompareResponse,
  LabelCode,
  MutationAck,
  ProcedureDetail,
  ProcedureListItem,
  ReportData,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = 'Error';
  let message = response.statusText;
  try {
    const body = await response.json();
    if (typeof body.error === 'string') code = body.error;
    if (typeof body.message === 'string') message = body.message;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private json(method: string, payload: unknown): RequestInit {
    return {
      method,
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    };
  }

  listProcedures(): Promise<ProcedureListItem[]> {
    return this.request('/procedures');
  }

  getProcedure(id: string): Promise<ProcedureDetail> {
    return this.request(`/procedures/${id}`);
  }

  postAnnotation(
    id: string,
    body: { start_frame: number; end_frame: number; label: LabelCode; revision?: number },
  ): Promise<MutationAck> {
    return this.request(`/procedures/${id}/annotations`, this.json('POST', body));
  }

  deleteAnnotation(id: string, annotationId: string, revision?: number): Promise<MutationAck> {
    const query = revision === undefined ? '' : `?revision=${revision}`;
    return this.request(`/procedures/${id}/annotations/${annotationId}${query}`, {
      method: 'DELETE',
    });
  }

  postTag(
    id: string,
    body: {
      frame: number;
      distance_cm?: number;
      findings?: string;
      impressions?: string;
      revision?: number;
    },
  ): Promise<MutationAck> {
    return this.request(`/procedures/${id}/tags`, this.json('POST', body));
  }

  postReport(id: string, patientContext: Record<string, string>, revision?: number) {
    return this.request<{ report: ReportData; revision: number }>(
      `/procedures/${id}/report`,
      this.json('POST', { patient_context: patientContext, revision }),
    );
  }

  putManualSections(
    id: string,
    sections: {
      preparation: string;
      procedure_notes: string;
      complications: string;
      recommendations: string;
    },
    revision?: number,
  ) {
    return this.request<{ report: ReportData; revision: number }>(
      `/procedures/${id}/report/manual-sections`,
      this.json('PUT', { ...sections, revision }),
    );
  }

  finalizeReport(id: string, revision?: number) {
    return this.request<{ report: ReportData; revision: number }>(
      `/procedures/${id}/report/finalize`,
      this.json('POST', { revision }),
    );
  }

  compare(ids: string[]): Promise<CompareResponse> {
    return this.request(`/compare?ids=${ids.join(',')}`);
  }

  videoUrl(id: string): string {
    return `${this.baseUrl}/procedures/${id}/video`;
  }
}
