import { describe, expect, it } from 'vitest';

import { TimelineViewState, frameForTime, timeForFrame } from '../src/timeline.js';
import type { LayoutRow } from '../src/types.js';

describe('frame/time sync', () => {
  it('rounds time times fps to the nearest frame', () => {
    expect(frameForTime(240.0, 15, 27000)).toBe(3600);
    expect(frameForTime(0.99, 15, 27000)).toBe(15);
    expect(frameForTime(10.03, 15, 27000)).toBe(150);
  });

  it('clamps to the video bounds', () => {
    expect(frameForTime(99999, 15, 27000)).toBe(26999);
    expect(frameForTime(-1, 15, 27000)).toBe(0);
  });

  it('round-trips frame to time', () => {
    expect(timeForFrame(3600, 15)).toBe(240.0);
  });
});

describe('timeline view state', () => {
  const rows: LayoutRow[] = [
    { layer: 0, entries: [{ start_frame: 0, end_frame: 900, label: 'R', annotation_id: 'a1' }] },
    { layer: 1, entries: [] },
    { layer: 2, entries: [] },
    { layer: 3, entries: [] },
  ];

  it('mirrors the layout it was given without reordering', () => {
    const view = new TimelineViewState(27000, 15);
    view.setLayout(rows);
    expect(view.rows).toBe(rows);
  });

  it('tracks gestures only while armed', () => {
    const view = new TimelineViewState(27000, 15);
    expect(view.beginGesture(100)).toBe(false);
    view.armAnnotate(true);
    expect(view.beginGesture(100)).toBe(true);
    view.dragGesture(400);
    expect(view.pendingGesture).toEqual({ pressFrame: 100, dragFrame: 400 });
    expect(view.releaseGesture(400)).toEqual({ start: 100, end: 400 });
    expect(view.pendingGesture).toBeNull();
  });

  it('disarming clears a pending gesture', () => {
    const view = new TimelineViewState(27000, 15);
    view.armAnnotate(true);
    view.beginGesture(100);
    view.armAnnotate(false);
    expect(view.pendingGesture).toBeNull();
  });

  it('positions frames within the zoom window', () => {
    const view = new TimelineViewState(1000, 15);
    expect(view.positionFor(500)).toBe(0.5);
    view.setZoom(500, 1000);
    expect(view.positionFor(500)).toBe(0);
    expect(view.positionFor(750)).toBe(0.5);
    expect(view.positionFor(100)).toBe(0); // clamped
  });

  it('scrubbing updates the cursor frame', () => {
    const view = new TimelineViewState(27000, 15);
    view.seekToTime(240.0);
    expect(view.currentFrame).toBe(3600);
  });
});
