// Report view model: generate a draft, edit the manual sections, finalize.
// Thin projection of the report API; errors surface inline, never silently.

import { ApiClient, ApiError } from './api.js';
import type { ReportData } from './types.js';

export interface ManualSections {
  preparation: string;
  procedure_notes: string;
  complications: string;
  recommendations: string;
}

export class ReportView {
  report: ReportData | null = null;
  inlineError: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly procedureId: string,
  ) {}

  async generate(patientContext: Record<string, string> = {}): Promise<void> {
    this.inlineError = null;
    try {
      const response = await this.api.postReport(this.procedureId, patientContext);
      this.report = response.report;
    } catch (error) {
      this.captureError(error);
    }
  }

  async saveManualSections(sections: ManualSections): Promise<void> {
    this.inlineError = null;
    try {
      const response = await this.api.putManualSections(this.procedureId, sections);
      this.report = response.report;
    } catch (error) {
      this.captureError(error);
    }
  }

  async finalize(): Promise<void> {
    this.inlineError = null;
    try {
      const response = await this.api.finalizeReport(this.procedureId);
      this.report = response.report;
    } catch (error) {
      this.captureError(error);
    }
  }

  private captureError(error: unknown): void {
    if (error instanceof ApiError) {
      this.inlineError = `${error.code}: ${error.message}`;
      return;
    }
    throw error;
  }
}
