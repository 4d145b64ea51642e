import { describe, expect, it } from "vitest";

import { BASELINE, DESIGNS, renderOverlay } from "../src/overlay.js";

const SNAPSHOT_MAGNITUDES = [0, 0.25, 0.5, 1];

describe("renderOverlay", () => {
  it("renders a = 0 identically to baseline for every design", () => {
    for (const design of DESIGNS) {
      expect(renderOverlay(design, 0)).toEqual(BASELINE);
    }
  });

  it("renders design none identically to baseline at every magnitude", () => {
    for (const a of SNAPSHOT_MAGNITUDES) {
      expect(renderOverlay("none", a)).toEqual(BASELINE);
    }
  });

  it("matches the expected snapshot states", () => {
    expect(SNAPSHOT_MAGNITUDES.map((a) => renderOverlay("ambient_light", a))).toEqual([
      BASELINE,
      { ...BASELINE, ambient: { visible: true, opacity: 0.25, haloRadiusPx: 26 } },
      { ...BASELINE, ambient: { visible: true, opacity: 0.5, haloRadiusPx: 44 } },
      { ...BASELINE, ambient: { visible: true, opacity: 1, haloRadiusPx: 80 } },
    ]);
    expect(SNAPSHOT_MAGNITUDES.map((a) => renderOverlay("icon", a))).toEqual([
      BASELINE,
      { ...BASELINE, icon: { visible: true, scale: 0.4 + 0.6 * 0.25 } },
      { ...BASELINE, icon: { visible: true, scale: 0.7 } },
      { ...BASELINE, icon: { visible: true, scale: 1 } },
    ]);
    expect(SNAPSHOT_MAGNITUDES.map((a) => renderOverlay("vibration", a))).toEqual([
      BASELINE,
      { ...BASELINE, meter: { visible: true, duty: 0.7 * 0.25 } },
      { ...BASELINE, meter: { visible: true, duty: 0.35 } },
      { ...BASELINE, meter: { visible: true, duty: 0.7 } },
    ]);
  });

  it("is monotone in a for every design", () => {
    const grid = SNAPSHOT_MAGNITUDES;
    const opacity = grid.map((a) => renderOverlay("ambient_light", a).ambient.opacity);
    const radius = grid.map((a) => renderOverlay("ambient_light", a).ambient.haloRadiusPx || 0);
    const scale = grid.map((a) => renderOverlay("icon", a).icon.scale);
    const duty = grid.map((a) => renderOverlay("vibration", a).meter.duty);
    for (const series of [opacity, radius, scale, duty]) {
      for (let i = 1; i < series.length; i += 1) {
        expect(series[i]!).toBeGreaterThanOrEqual(series[i - 1]!);
      }
    }
  });

  it("keeps duty within the motor cap", () => {
    for (let a = 0; a <= 1.0001; a += 0.05) {
      const duty = renderOverlay("vibration", Math.min(a, 1)).meter.duty;
      expect(duty).toBeGreaterThanOrEqual(0);
      expect(duty).toBeLessThanOrEqual(0.7);
    }
  });

  it("clamps out-of-range magnitudes instead of failing", () => {
    expect(renderOverlay("vibration", 2).meter.duty).toBeCloseTo(0.7, 12);
    expect(renderOverlay("ambient_light", -1)).toEqual(BASELINE);
    expect(renderOverlay("icon", Number.NaN)).toEqual(BASELINE);
  });
});
