/**
 * Pure overlay state: what each feedback design shows at magnitude a.
 *
 * The quiescent rule matters for the baseline condition: anything not
 * visibly contributing is marked invisible, so a = 0 (or design "none")
 * renders exactly like an unmodified player for every design.
 */

import { mapAmbient, mapIcon, mapVibration } from "./feedback.js";

export type Design = "none" | "ambient_light" | "icon" | "vibration";

export const DESIGNS: Design[] = ["none", "ambient_light", "icon", "vibration"];

export interface OverlayState {
  ambient: { visible: boolean; opacity: number; haloRadiusPx: number };
  icon: { visible: boolean; scale: number };
  meter: { visible: boolean; duty: number };
}

export const BASELINE: OverlayState = {
  ambient: { visible: false, opacity: 0, haloRadiusPx: 0 },
  icon: { visible: false, scale: 0 },
  meter: { visible: false, duty: 0 },
};

/** Visual state for one design at magnitude a (clamped defensively). */
export function renderOverlay(design: Design, a: number): OverlayState {
  const clamped = Math.min(1, Math.max(0, Number.isFinite(a) ? a : 0));
  const state: OverlayState = {
    ambient: { ...BASELINE.ambient },
    icon: { ...BASELINE.icon },
    meter: { ...BASELINE.meter },
  };
  if (design === "ambient_light") {
    const level = mapAmbient(clamped);
    if (level.opacity > 0) {
      state.ambient = { visible: true, opacity: level.opacity, haloRadiusPx: level.haloRadiusPx };
    }
  } else if (design === "icon") {
    const level = mapIcon(clamped);
    if (level.visible) {
      state.icon = { visible: true, scale: level.scale };
    }
  } else if (design === "vibration") {
    const duty = mapVibration(clamped);
    if (duty > 0) {
      state.meter = { visible: true, duty };
    }
  }
  return state;
}
