/**
 * Replay of a fitted distribution spec (the logsim JSON format), used to
 * draw case inter-arrival gaps. Mirrors the seven families; negative
 * draws retry up to 100 times then clamp to 0.
 */

import { readFileSync } from "node:fs";
import { Rng } from "./rng.js";

export interface DistributionSpec {
  family: string;
  params: Record<string, number>;
  fit_error?: number;
}

export function loadSpec(path: string): DistributionSpec {
  const doc = JSON.parse(readFileSync(path, "utf-8"));
  if (typeof doc.family !== "string" || typeof doc.params !== "object") {
    throw new Error(`${path}: not a distribution spec`);
  }
  return doc;
}

export function sampleSpec(spec: DistributionSpec, rng: Rng): number {
  for (let attempt = 0; attempt <= 100; attempt++) {
    const x = draw(spec, rng);
    if (x >= 0) return x;
  }
  return 0;
}

function draw(spec: DistributionSpec, rng: Rng): number {
  const p = spec.params;
  switch (spec.family) {
    case "fixed":
      return p.value;
    case "normal":
      return p.mean + p.std * rng.normal();
    case "exponential":
      return -p.mean * Math.log(1 - rng.uniform());
    case "uniform":
      return p.low + (p.high - p.low) * rng.uniform();
    case "lognormal":
      return Math.exp(p.mu + p.sigma * rng.normal());
    case "gamma":
      return drawGamma(p.shape, p.scale, rng);
    case "triangular": {
      if (p.high === p.low) return p.low;
      const u = rng.uniform();
      const cut = (p.mode - p.low) / (p.high - p.low);
      if (u < cut) return p.low + Math.sqrt(u * (p.high - p.low) * (p.mode - p.low));
      return p.high - Math.sqrt((1 - u) * (p.high - p.low) * (p.high - p.mode));
    }
    default:
      throw new Error(`unknown distribution family: ${spec.family}`);
  }
}

function drawGamma(shape: number, scale: number, rng: Rng): number {
  if (shape < 1) {
    const u = rng.uniform();
    return drawGamma(shape + 1, scale, rng) * (1 - u) ** (1 / shape);
  }
  const d = shape - 1 / 3;
  const c = 1 / Math.sqrt(9 * d);
  for (;;) {
    const x = rng.normal();
    const t = 1 + c * x;
    if (t <= 0) continue;
    const v = t * t * t;
    const u = rng.uniform();
    if (u < 1 - 0.0331 * x ** 4) return d * v * scale;
    if (u > 0 && Math.log(u) < 0.5 * x * x + d * (1 - v + Math.log(v))) return d * v * scale;
  }
}
