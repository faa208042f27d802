// Sweep playback: an ordered frame list with play/pause/scrub.

import type { SlicePayload } from "./types.js";

export interface SweepCallbacks {
  onFrame(frame: SlicePayload, index: number): void;
  onPlayStateChange?(playing: boolean): void;
}

export interface SweepOptions {
  intervalMs?: number;
  setIntervalImpl?: (fn: () => void, ms: number) => unknown;
  clearIntervalImpl?: (handle: unknown) => void;
}

export class SweepPlayback {
  private frames: SlicePayload[] = [];
  private index = 0;
  private timer: unknown = null;
  private readonly intervalMs: number;
  private setI: (fn: () => void, ms: number) => unknown;
  private clearI: (handle: unknown) => void;

  constructor(private cb: SweepCallbacks, opts: SweepOptions = {}) {
    this.intervalMs = opts.intervalMs ?? 250;
    this.setI = opts.setIntervalImpl ?? ((fn, ms) => setInterval(fn, ms));
    this.clearI = opts.clearIntervalImpl ?? ((h) => clearInterval(h as number));
  }

  get playing(): boolean {
    return this.timer !== null;
  }

  get frameCount(): number {
    return this.frames.length;
  }

  get currentIndex(): number {
    return this.index;
  }

  load(frames: SlicePayload[]): void {
    this.pause();
    this.frames = frames;
    this.index = 0;
    if (frames.length) this.cb.onFrame(frames[0], 0);
  }

  /** Append a frame as it arrives from the push channel. */
  push(frame: SlicePayload): void {
    this.frames.push(frame);
    if (this.frames.length === 1) this.cb.onFrame(frame, 0);
  }

  play(): void {
    if (this.playing || !this.frames.length) return;
    this.timer = this.setI(() => this.step(), this.intervalMs);
    this.cb.onPlayStateChange?.(true);
  }

  pause(): void {
    if (this.timer !== null) {
      this.clearI(this.timer);
      this.timer = null;
      this.cb.onPlayStateChange?.(false);
    }
  }

  /** Show frame k (clamped); pauses nothing, scrubbing while playing is fine. */
  scrubTo(k: number): void {
    if (!this.frames.length) return;
    this.index = Math.min(this.frames.length - 1, Math.max(0, Math.floor(k)));
    this.cb.onFrame(this.frames[this.index], this.index);
  }

  private step(): void {
    if (!this.frames.length) return;
    this.index = (this.index + 1) % this.frames.length;
    this.cb.onFrame(this.frames[this.index], this.index);
  }
}
