// View state for the multi-row timeline: cursor, zoom window, the rows as
// the server laid them out, and the in-flight drag gesture.
//
// The rows are server-authoritative: setLayout stores exactly what the
// layout response said, and rendering walks that structure without
// reordering or fabricating entries.

import type { LayoutRow } from './types.js';

export interface PendingGesture {
  pressFrame: number;
  dragFrame: number;
}

export interface FrameRange {
  start: number;
  end: number;
}

/** Cursor/time sync: frame = round(time x fps), clamped into the video. */
export function frameForTime(timeS: number, fps: number, frameCount: number): number {
  const frame = Math.round(timeS * fps);
  return Math.min(Math.max(frame, 0), frameCount - 1);
}

export function timeForFrame(frame: number, fps: number): number {
  return frame / fps;
}

/** A right-to-left drag is the same interval as its mirror image. */
export function normalizeGesture(pressFrame: number, releaseFrame: number): FrameRange | null {
  const start = Math.min(pressFrame, releaseFrame);
  const end = Math.max(pressFrame, releaseFrame);
  if (start === end) return null; // a click, not a drag: no interval
  return { start, end };
}

export class TimelineViewState {
  currentFrame = 0;
  zoom: FrameRange;
  rows: LayoutRow[] = [];
  pendingGesture: PendingGesture | null = null;
  selectedAnnotationId: string | null = null;
  selectedTagId: string | null = null;
  annotateArmed = false;

  constructor(
    public readonly frameCount: number,
    public readonly fps: number,
  ) {
    this.zoom = { start: 0, end: frameCount };
  }

  /** Mirror the server's hierarchy layout verbatim. */
  setLayout(rows: LayoutRow[]): void {
    this.rows = rows;
  }

  armAnnotate(armed: boolean): void {
    this.annotateArmed = armed;
    if (!armed) this.pendingGesture = null;
  }

  beginGesture(frame: number): boolean {
    if (!this.annotateArmed) return false;
    this.pendingGesture = { pressFrame: frame, dragFrame: frame };
    return true;
  }

  dragGesture(frame: number): void {
    if (this.pendingGesture) this.pendingGesture.dragFrame = frame;
  }

  /** Finish the drag; returns the normalized range or null for a bare click. */
  releaseGesture(frame: number): FrameRange | null {
    if (!this.pendingGesture) return null;
    const range = normalizeGesture(this.pendingGesture.pressFrame, frame);
    this.pendingGesture = null;
    return range;
  }

  seekToTime(timeS: number): void {
    this.currentFrame = frameForTime(timeS, this.fps, this.frameCount);
  }

  setZoom(start: number, end: number): void {
    const lo = Math.max(0, Math.min(start, end));
    const hi = Math.min(this.frameCount, Math.max(start, end));
    if (hi > lo) this.zoom = { start: lo, end: hi };
  }

  /** Horizontal position of a frame inside the zoom window, in [0, 1]. */
  positionFor(frame: number): number {
    const span = this.zoom.end - this.zoom.start;
    return Math.min(1, Math.max(0, (frame - this.zoom.start) / span));
  }
}
