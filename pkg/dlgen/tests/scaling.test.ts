import { describe, expect, it } from "vitest";
import { Rng } from "../src/rng.js";
import { chooseScalingMode, fitScaler, invert, scale } from "../src/scaling.js";

describe("scaling round trips", () => {
  const values = [0, 0.001, 1, 30, 59.5, 3600, 86_400, 2_000_000];

  it("min-max inverts within 1e-6 relative", () => {
    const scaler = fitScaler(values, "normalization");
    for (const v of values) {
      const back = invert(scale(v, scaler), scaler);
      const tol = Math.max(1e-9, 1e-6 * Math.abs(v));
      expect(Math.abs(back - v)).toBeLessThanOrEqual(tol);
    }
  });

  it("log min-max inverts within 1e-6 relative", () => {
    const scaler = fitScaler(values, "log_normalization");
    for (const v of values) {
      const back = invert(scale(v, scaler), scaler);
      const tol = Math.max(1e-9, 1e-6 * Math.abs(v));
      expect(Math.abs(back - v)).toBeLessThanOrEqual(tol);
    }
  });

  it("random positive values round-trip in both modes", () => {
    const rng = new Rng(9);
    const data = Array.from({ length: 500 }, () => rng.uniform() * 1e6);
    for (const mode of ["normalization", "log_normalization"] as const) {
      const scaler = fitScaler(data, mode);
      for (const v of data) {
        const back = invert(scale(v, scaler), scaler);
        expect(Math.abs(back - v) / v).toBeLessThanOrEqual(1e-6);
      }
    }
  });

  it("maps endpoints of {0, 50, 100} to {0, 0.5, 1}", () => {
    const scaler = fitScaler([0, 50, 100], "normalization");
    expect(scale(0, scaler)).toBe(0);
    expect(scale(50, scaler)).toBe(0.5);
    expect(scale(100, scaler)).toBe(1);
  });

  it("keeps scaled values in [0, 1] even out of range", () => {
    const scaler = fitScaler([10, 20], "normalization");
    expect(scale(5, scaler)).toBe(0);
    expect(scale(25, scaler)).toBe(1);
  });

  it("degenerate constant data scales to 0", () => {
    const scaler = fitScaler([7, 7, 7], "normalization");
    expect(scale(7, scaler)).toBe(0);
    expect(invert(0, scaler)).toBe(7);
  });
});

describe("scaling mode selection", () => {
  it("prefers plain normalization for low dispersion", () => {
    expect(chooseScalingMode([100, 110, 95, 105])).toBe("normalization");
  });

  it("prefers log scaling for highly dispersed data", () => {
    const skewed = [...Array(99).fill(1), 100_000_000]; // cv ~ 10
    expect(chooseScalingMode(skewed)).toBe("log_normalization");
  });
});
