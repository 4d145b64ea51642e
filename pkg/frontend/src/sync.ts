/**
 * Playback-synchronized magnitude sampling.
 *
 * Every animation frame reads the player's reported position and indexes
 * the magnitude curve directly (no accumulated animation clock), so
 * pausing freezes the magnitude and seeking re-indexes on the next frame;
 * the displayed value can never drift more than the player's own
 * reporting error from the true curve.
 */

import {
  Aggregate,
  KeyframeTimeline,
  magnitudeAt,
  magnitudeAtKeyframes,
} from "./feedback.js";

export interface PlaybackClock {
  /** Current playback position in seconds (HTMLMediaElement.currentTime). */
  currentTimeS(): number;
}

/** A magnitude source: an aggregate grid or a keyframe step timeline. */
export interface MagnitudeCurve {
  at(videoTimeS: number): number;
}

export function aggregateCurve(agg: Aggregate): MagnitudeCurve {
  return { at: (t) => magnitudeAt(agg, t) };
}

export function keyframeCurve(timeline: KeyframeTimeline): MagnitudeCurve {
  return { at: (t) => magnitudeAtKeyframes(timeline, t) };
}

export class SyncLoop {
  private rafId: number | null = null;

  constructor(
    private readonly onMagnitude: (a: number, videoTimeS: number) => void,
  ) {}

  /** Sample once: compute and deliver the magnitude for the clock's position. */
  step(curve: MagnitudeCurve, clock: PlaybackClock): number {
    const t = Math.max(0, clock.currentTimeS());
    const a = curve.at(t);
    this.onMagnitude(a, t);
    return a;
  }

  start(curve: MagnitudeCurve, clock: PlaybackClock): void {
    this.stop();
    const tick = () => {
      this.step(curve, clock);
      this.rafId = requestAnimationFrame(tick);
    };
    this.rafId = requestAnimationFrame(tick);
  }

  stop(): void {
    if (this.rafId !== null) {
      cancelAnimationFrame(this.rafId);
      this.rafId = null;
    }
  }
}
