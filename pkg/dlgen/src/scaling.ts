/**
 * Feature scaling for the time attributes: plain min-max over the raw
 * values, or min-max over ln(1+x) when the data is highly dispersed.
 * All arithmetic stays in float64 so inversion round-trips tightly.
 */

export type ScalingMode = "normalization" | "log_normalization";

export interface Scaler {
  mode: ScalingMode;
  lo: number;
  hi: number;
}

/** Coefficient of variation above this prefers log scaling. */
export const LOG_SCALING_CV_THRESHOLD = 5.0;

export function chooseScalingMode(values: number[]): ScalingMode {
  const n = values.length;
  if (n === 0) return "normalization";
  const mean = values.reduce((a, b) => a + b, 0) / n;
  if (mean <= 0) return "normalization";
  const variance = values.reduce((a, b) => a + (b - mean) ** 2, 0) / n;
  const cv = Math.sqrt(variance) / mean;
  return cv > LOG_SCALING_CV_THRESHOLD ? "log_normalization" : "normalization";
}

export function fitScaler(values: number[], mode: ScalingMode): Scaler {
  const xs = mode === "log_normalization" ? values.map((v) => Math.log1p(v)) : values;
  let lo = Infinity;
  let hi = -Infinity;
  for (const x of xs) {
    if (x < lo) lo = x;
    if (x > hi) hi = x;
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 0;
  }
  return { mode, lo, hi };
}

export function scale(value: number, scaler: Scaler): number {
  const x = scaler.mode === "log_normalization" ? Math.log1p(value) : value;
  if (scaler.hi === scaler.lo) return 0;
  const y = (x - scaler.lo) / (scaler.hi - scaler.lo);
  return Math.min(1, Math.max(0, y));
}

export function invert(y: number, scaler: Scaler): number {
  const x = y * (scaler.hi - scaler.lo) + scaler.lo;
  return scaler.mode === "log_normalization" ? Math.expm1(x) : x;
}
