// Tag glyph selection: a distance-only tag renders as a plain tick mark on
// the timeline, anything carrying findings or impressions renders as a
// full tag marker.

import type { TagData } from './types.js';

export type GlyphKind = 'distance-mark' | 'full-tag';

export function glyphForTag(tag: Pick<TagData, 'distance_cm' | 'findings' | 'impressions'>): GlyphKind {
  const hasDistance = tag.distance_cm !== undefined && tag.distance_cm !== null;
  const hasText =
    (tag.findings !== undefined && tag.findings !== null) ||
    (tag.impressions !== undefined && tag.impressions !== null);
  return hasDistance && !hasText ? 'distance-mark' : 'full-tag';
}

/** Client-side hint only; the server remains authoritative. */
export function distanceFieldValid(raw: string): boolean {
  if (raw.trim() === '') return true;
  const value = Number(raw);
  return Number.isInteger(value) && value >= 0 && value % 5 === 0;
}
