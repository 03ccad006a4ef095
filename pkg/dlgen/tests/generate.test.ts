import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { writeLog } from "../src/csv.js";
import { preprocess } from "../src/encode.js";
import { generateLog } from "../src/generate.js";
import { DEFAULT_CONFIG } from "../src/model.js";
import type { DistributionSpec } from "../src/sampling.js";
import { loadModel, saveModel, train, TrainedModel } from "../src/train.js";
import { ABC_ROLES, abcLog } from "./helpers.js";

const IA: DistributionSpec = { family: "fixed", params: { value: 600 } };

let trained: TrainedModel;
let workDir: string;

beforeAll(async () => {
  const dataset = preprocess(abcLog(100), ABC_ROLES, 5);
  trained = await train(dataset, {
    ...DEFAULT_CONFIG,
    hiddenUnits: 24,
    embeddingDims: 6,
    epochs: 80,
    seed: 3,
  });
  workDir = mkdtempSync(join(tmpdir(), "dlgen-test-"));
}, 120_000);

afterAll(() => {
  rmSync(workDir, { recursive: true, force: true });
});

describe("autoregressive generation", () => {
  it("reproduces a deterministic process in at least 95% of traces", async () => {
    const generated = await generateLog(trained, { numTraces: 1000, seed: 5, interarrival: IA });
    const exact = generated.traces.filter(
      (t) => t.events.map((e) => e.activity).join(",") === "A,B,C",
    ).length;
    expect(exact / generated.traces.length).toBeGreaterThanOrEqual(0.95);
    expect(generated.cappedTraces).toBeLessThanOrEqual(generated.traces.length * 0.1);
  }, 120_000);

  it("produces valid timestamps and replayed arrivals", async () => {
    const generated = await generateLog(trained, {
      numTraces: 20,
      seed: 9,
      interarrival: IA,
      startInstantMs: 1_000_000,
    });
    const arrivals = generated.traces.map((t) => t.events[0].startMs);
    expect(arrivals[0]).toBe(1_000_000);
    for (let i = 1; i < arrivals.length; i++) {
      expect(arrivals[i] - arrivals[i - 1]).toBe(600_000); // fixed(600 s)
    }
    for (const trace of generated.traces) {
      for (const e of trace.events) {
        expect(e.endMs).toBeGreaterThanOrEqual(e.startMs);
      }
    }
  }, 60_000);

  it("is deterministic per seed", async () => {
    const a = await generateLog(trained, { numTraces: 15, seed: 11, interarrival: IA });
    const b = await generateLog(trained, { numTraces: 15, seed: 11, interarrival: IA });
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  }, 60_000);

  it("zero traces yields a header-only CSV", async () => {
    const generated = await generateLog(trained, { numTraces: 0, seed: 1, interarrival: IA });
    const path = join(workDir, "empty.csv");
    writeLog(generated.traces, path);
    expect(readFileSync(path, "utf-8")).toBe(
      "case_id,activity,resource,start_timestamp,end_timestamp\n",
    );
  });

  it("model persistence round-trips generation", async () => {
    const path = join(workDir, "model.json");
    await saveModel(trained, path);
    const reloaded = await loadModel(path);
    const a = await generateLog(trained, { numTraces: 10, seed: 21, interarrival: IA });
    const b = await generateLog(reloaded, { numTraces: 10, seed: 21, interarrival: IA });
    expect(JSON.stringify(a.traces)).toBe(JSON.stringify(b.traces));
  }, 60_000);

  it("generated CSV passes the primary parser with zero errors", async () => {
    const generated = await generateLog(trained, { numTraces: 50, seed: 31, interarrival: IA });
    const path = join(workDir, "generated.csv");
    writeLog(generated.traces, path);
    const out = execFileSync("logsim", ["stats", "--log", path], { encoding: "utf-8" });
    expect(out).toContain("num_traces");
    expect(out).toContain("50");
  }, 60_000);
});
