// Video player adapter: the comparison and timeline views only need
// frame-accurate seeking and a time callback, so they depend on this
// interface rather than on HTMLVideoElement.

import { frameForTime, timeForFrame } from './timeline.js';

export interface FramePlayer {
  seekToFrame(frame: number): void;
  readonly currentFrame: number;
}

/** Wraps an HTMLVideoElement, converting between seconds and frames. */
export class HtmlVideoPlayer implements FramePlayer {
  constructor(
    private readonly element: HTMLVideoElement,
    private readonly fps: number,
    private readonly frameCount: number,
  ) {}

  seekToFrame(frame: number): void {
    this.element.currentTime = timeForFrame(frame, this.fps);
  }

  get currentFrame(): number {
    return frameForTime(this.element.currentTime, this.fps, this.frameCount);
  }

  onFrameChange(callback: (frame: number) => void): void {
    this.element.addEventListener('timeupdate', () => {
      callback(this.currentFrame);
    });
  }
}
