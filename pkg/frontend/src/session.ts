// One editing session per procedure: holds the latest server state and the
// revision token, funnels every mutation through the API with that token,
// and on a stale-revision conflict reloads and replays nothing.

import { ApiClient, ApiError } from './api.js';
import type { LabelCode, ProcedureDetail, TagData } from './types.js';
import { TimelineViewState, normalizeGesture } from './timeline.js';

export type MutationOutcome =
  | { kind: 'ok' }
  | { kind: 'discarded'; code: string; message: string };

export class ProcedureSession {
  detail!: ProcedureDetail;
  view!: TimelineViewState;

  constructor(
    private readonly api: ApiClient,
    public readonly procedureId: string,
  ) {}

  get revision(): number {
    return this.detail.revision;
  }

  async load(): Promise<void> {
    this.detail = await this.api.getProcedure(this.procedureId);
    const video = this.detail.timeline.video;
    if (!this.view || this.view.frameCount !== video.frame_count) {
      this.view = new TimelineViewState(video.frame_count, video.fps);
    }
    this.view.setLayout(this.detail.layout);
  }

  /**
   * Drag-to-annotate: normalize the gesture, issue exactly one POST, and on
   * success re-render from the server's layout. Conflicts and validation
   * failures surface inline and the gesture is discarded.
   */
  async annotateGesture(
    pressFrame: number,
    releaseFrame: number,
    label: LabelCode,
  ): Promise<MutationOutcome> {
    const range = normalizeGesture(pressFrame, releaseFrame);
    if (range === null) {
      return { kind: 'discarded', code: 'EmptyGesture', message: 'drag spans no frames' };
    }
    try {
      await this.api.postAnnotation(this.procedureId, {
        start_frame: range.start,
        end_frame: range.end,
        label,
        revision: this.revision,
      });
    } catch (error) {
      return this.handleMutationError(error);
    }
    await this.load();
    return { kind: 'ok' };
  }

  /** Right-click tag dialog submission; classification comes from the server. */
  async submitTag(
    frame: number,
    fields: { distance_cm?: number; findings?: string; impressions?: string },
  ): Promise<MutationOutcome & { classification?: 'distance_mark' | 'full_tag' }> {
    try {
      const ack = await this.api.postTag(this.procedureId, {
        frame,
        ...fields,
        revision: this.revision,
      });
      await this.load();
      return { kind: 'ok', classification: ack.classification };
    } catch (error) {
      return this.handleMutationError(error);
    }
  }

  async removeAnnotation(annotationId: string): Promise<MutationOutcome> {
    try {
      await this.api.deleteAnnotation(this.procedureId, annotationId, this.revision);
    } catch (error) {
      return this.handleMutationError(error);
    }
    await this.load();
    return { kind: 'ok' };
  }

  tags(): TagData[] {
    return this.detail.timeline.tags;
  }

  private async handleMutationError(error: unknown): Promise<MutationOutcome> {
    if (error instanceof ApiError) {
      if (error.code === 'RevisionConflict') {
        await this.load(); // someone else edited: resync, replay nothing
      }
      return { kind: 'discarded', code: error.code, message: error.message };
    }
    throw error;
  }
}
