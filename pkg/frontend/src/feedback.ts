/**
 * Magnitude mappings for the three feedback designs, mirroring the server's
 * constants: vibration duty 0.7*a, halo opacity a with radius 8 + 72*a px,
 * icon scale 0.4 + 0.6*a shown from a >= 0.01.
 */

export interface Aggregate {
  video_id: string;
  grid_hz: number;
  n_viewers: number;
  values: number[];
}

export const DUTY_MAX = 0.7;
export const HALO_MIN_PX = 8;
export const HALO_SPAN_PX = 72;
export const ICON_SHOW_THRESHOLD = 0.01;
export const ICON_MIN_SCALE = 0.4;
export const ICON_SCALE_SPAN = 0.6;

function checkMagnitude(a: number): number {
  if (!Number.isFinite(a) || a < 0 || a > 1) {
    throw new RangeError(`magnitude must be in [0, 1], got ${a}`);
  }
  return a;
}

export function mapVibration(a: number): number {
  return DUTY_MAX * checkMagnitude(a);
}

export function mapAmbient(a: number): { opacity: number; haloRadiusPx: number } {
  checkMagnitude(a);
  return { opacity: a, haloRadiusPx: HALO_MIN_PX + HALO_SPAN_PX * a };
}

export function mapIcon(a: number): { visible: boolean; scale: number } {
  checkMagnitude(a);
  return { visible: a >= ICON_SHOW_THRESHOLD, scale: ICON_MIN_SCALE + ICON_SCALE_SPAN * a };
}

/** Aggregate value at a video time; clamps past the end of the series. */
export function magnitudeAt(agg: Aggregate, videoTimeS: number): number {
  if (!Number.isFinite(videoTimeS) || videoTimeS < 0) {
    throw new RangeError(`video time must be finite and >= 0, got ${videoTimeS}`);
  }
  const idx = Math.min(Math.floor(videoTimeS * agg.grid_hz), agg.values.length - 1);
  return agg.values[Math.max(idx, 0)] ?? 0;
}

export interface KeyframeTimeline {
  design: string;
  keyframes: [number, number][];
}

/** Step-function playback of a keyframe file: hold the last keyframe value. */
export function magnitudeAtKeyframes(timeline: KeyframeTimeline, videoTimeS: number): number {
  if (!Number.isFinite(videoTimeS) || videoTimeS < 0) {
    throw new RangeError(`video time must be finite and >= 0, got ${videoTimeS}`);
  }
  let value = 0;
  for (const [t, magnitude] of timeline.keyframes) {
    if (t <= videoTimeS + 1e-12) value = magnitude;
    else break;
  }
  return value;
}

export function parseAggregateFile(text: string): Aggregate {
  const raw = JSON.parse(text) as Partial<Aggregate>;
  if (
    typeof raw.video_id !== "string" ||
    typeof raw.grid_hz !== "number" ||
    raw.grid_hz <= 0 ||
    typeof raw.n_viewers !== "number" ||
    !Array.isArray(raw.values) ||
    raw.values.some((v) => typeof v !== "number" || v < 0 || v > 1)
  ) {
    throw new Error("not an aggregate file");
  }
  return raw as Aggregate;
}

export function parseKeyframesFile(text: string): KeyframeTimeline {
  const raw = JSON.parse(text) as Partial<KeyframeTimeline>;
  if (
    typeof raw.design !== "string" ||
    !Array.isArray(raw.keyframes) ||
    raw.keyframes.some(
      (kf) => !Array.isArray(kf) || kf.length !== 2 || kf.some((x) => typeof x !== "number"),
    )
  ) {
    throw new Error("not a keyframes file");
  }
  return raw as KeyframeTimeline;
}
