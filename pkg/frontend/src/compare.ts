// Comparison view: the per-segment count table plus each case's tag strip.
// Clicking a tag opens the video window seeked to that tag's frame.

import { ApiClient } from './api.js';
import type { CompareRow, TagData } from './types.js';
import type { FramePlayer } from './player.js';

export interface CaseTags {
  procedureId: string;
  tags: TagData[];
}

export type PlayerOpener = (procedureId: string) => FramePlayer | Promise<FramePlayer>;

export class ComparisonView {
  rows: CompareRow[] = [];
  caseTags: CaseTags[] = [];
  csv = '';

  constructor(
    private readonly api: ApiClient,
    private readonly openPlayer: PlayerOpener,
  ) {}

  async load(procedureIds: string[]): Promise<void> {
    const response = await this.api.compare(procedureIds);
    this.rows = response.rows;
    this.csv = response.csv;
    this.caseTags = [];
    for (const procedureId of procedureIds) {
      const detail = await this.api.getProcedure(procedureId);
      this.caseTags.push({ procedureId, tags: detail.timeline.tags });
    }
  }

  /** "Once a tag is clicked, the video window with the tagged frame will open." */
  async clickTag(procedureId: string, tagId: string): Promise<void> {
    const entry = this.caseTags.find((c) => c.procedureId === procedureId);
    const tag = entry?.tags.find((t) => t.tag_id === tagId);
    if (!tag) return;
    const player = await this.openPlayer(procedureId);
    player.seekToFrame(tag.frame);
  }

  /** Table cell text in the export's P<i>/I<j>/B<k> shape. */
  cellText(row: CompareRow, segment: string): string {
    const counts = row.segments[segment] ?? {};
    return `P${counts['P'] ?? 0}/I${counts['I'] ?? 0}/B${counts['B'] ?? 0}`;
  }

  timeText(seconds: number | null): string {
    return seconds === null ? '—' : seconds.toFixed(1);
  }
}
