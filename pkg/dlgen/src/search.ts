/**
 * Seeded random search over the training hyperparameters. Mirrors the
 * discovery-side protocol: an 80/20 temporal split of the training log,
 * a fixed number of sampled configurations, several generated logs per
 * configuration sized like the validation fold, and selection by mean
 * event-log similarity. Scoring shells out to the logsim `evaluate`
 * command so both generator families are judged by the same code.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { LogTrace } from "./csv.js";
import { writeLog } from "./csv.js";
import { preprocess, RoleMap } from "./encode.js";
import { generateLog } from "./generate.js";
import { Cell, ModelConfig } from "./model.js";
import { Rng } from "./rng.js";
import type { DistributionSpec } from "./sampling.js";
import { TrainedModel, train } from "./train.js";

export interface SearchSpace {
  nGram: number[];
  architecture: ("specialized" | "shared_categorical" | "full_shared")[];
  hiddenUnits: number[];
  embeddingDims: number[];
  scaling: ("normalization" | "log_normalization")[];
}

export const DEFAULT_SEARCH_SPACE: SearchSpace = {
  nGram: [5, 10, 15],
  architecture: ["specialized", "shared_categorical", "full_shared"],
  hiddenUnits: [16, 32, 64],
  embeddingDims: [4, 8, 16],
  scaling: ["normalization", "log_normalization"],
};

export interface SearchOptions {
  cell: Cell;
  trials: number;
  runsPerTrial: number;
  seed: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  space?: SearchSpace;
  /** command used for scoring; array form, e.g. ["logsim"] */
  evaluateCommand?: string[];
}

export interface TrialRecord {
  trial: number;
  config: Record<string, unknown>;
  per_run_els: number[];
  mean_els: number;
}

export interface FailureRecord {
  trial: number;
  config: Record<string, unknown>;
  error: string;
}

export interface SearchResult {
  best: TrainedModel;
  bestTrial: TrialRecord;
  history: TrialRecord[];
  failures: FailureRecord[];
}

export function temporalSplit(traces: LogTrace[], ratio: number): [LogTrace[], LogTrace[]] {
  const ordered = [...traces].sort(
    (a, b) =>
      a.events[0].startMs - b.events[0].startMs ||
      (a.caseId < b.caseId ? -1 : a.caseId > b.caseId ? 1 : 0),
  );
  const cut = Math.ceil(ratio * ordered.length);
  if (cut === 0 || cut === ordered.length) {
    throw new Error(`degenerate split: ratio ${ratio} on ${ordered.length} traces`);
  }
  return [ordered.slice(0, cut), ordered.slice(cut)];
}

function checkEvaluateAvailable(command: string[]): void {
  const probe = spawnSync(command[0], [...command.slice(1), "--version"], { encoding: "utf-8" });
  if (probe.error || probe.status !== 0) {
    throw new Error(
      `evaluate CLI unavailable: cannot run '${command.join(" ")}' (${probe.error ?? probe.stderr})`,
    );
  }
}

export function scoreEls(
  command: string[],
  generatedCsv: string,
  truthCsv: string,
  workDir: string,
): number {
  const jsonPath = join(workDir, "metrics.json");
  const proc = spawnSync(
    command[0],
    [
      ...command.slice(1),
      "evaluate",
      "--generated",
      generatedCsv,
      "--truth",
      truthCsv,
      "--json",
      jsonPath,
    ],
    { encoding: "utf-8" },
  );
  if (proc.error || proc.status !== 0) {
    throw new Error(`evaluate failed: ${proc.error ?? proc.stderr}`);
  }
  return JSON.parse(readFileSync(jsonPath, "utf-8")).els;
}

function sampleConfig(space: SearchSpace, cell: Cell, base: SearchOptions, rng: Rng): ModelConfig {
  const pick = <T>(values: T[]): T => values[Math.floor(rng.uniform() * values.length) % values.length];
  return {
    nGram: pick(space.nGram),
    cell,
    architecture: pick(space.architecture),
    hiddenUnits: pick(space.hiddenUnits),
    embeddingDims: pick(space.embeddingDims),
    scaling: pick(space.scaling),
    epochs: base.epochs,
    batchSize: base.batchSize,
    learningRate: base.learningRate,
    seed: 0, // filled per trial
  };
}

export async function randomSearch(
  traces: LogTrace[],
  roleMap: RoleMap,
  interarrival: DistributionSpec,
  options: SearchOptions,
): Promise<SearchResult> {
  const command = options.evaluateCommand ?? ["logsim"];
  checkEvaluateAvailable(command);
  const space = options.space ?? DEFAULT_SEARCH_SPACE;
  const [fitFold, valFold] = temporalSplit(traces, 0.8);
  const root = new Rng(options.seed);
  const configRng = root.spawn(1);

  const workDir = mkdtempSync(join(tmpdir(), "dlgen-search-"));
  const truthCsv = join(workDir, "validation.csv");
  writeLog(valFold, truthCsv);

  const history: TrialRecord[] = [];
  const failures: FailureRecord[] = [];
  let best: { record: TrialRecord; model: TrainedModel } | null = null;
  try {
    for (let trial = 0; trial < options.trials; trial++) {
      const config = sampleConfig(space, options.cell, options, configRng);
      config.seed = Number(root.spawn(500 + trial).nextU64() & 0xffffffffn);
      const publicConfig: Record<string, unknown> = { ...config };
      try {
        const dataset = preprocess(
          fitFold,
          roleMap,
          config.nGram,
          config.scaling === "auto" ? undefined : config.scaling,
        );
        const trained = await train(dataset, config);
        const scores: number[] = [];
        for (let run = 0; run < options.runsPerTrial; run++) {
          const generated = await generateLog(trained, {
            numTraces: valFold.length,
            seed: Number(root.spawn(10_000 + trial * 100 + run).nextU64() & 0xffffffffn),
            interarrival,
            startInstantMs: valFold[0].events[0].startMs,
          });
          const genCsv = join(workDir, `gen-${trial}-${run}.csv`);
          writeLog(generated.traces, genCsv);
          scores.push(scoreEls(command, genCsv, truthCsv, workDir));
        }
        const record: TrialRecord = {
          trial,
          config: publicConfig,
          per_run_els: scores,
          mean_els: scores.reduce((a, b) => a + b, 0) / scores.length,
        };
        history.push(record);
        if (!best || record.mean_els > best.record.mean_els) {
          best = { record, model: trained };
        }
      } catch (err) {
        failures.push({ trial, config: publicConfig, error: String(err) });
      }
    }
  } finally {
    rmSync(workDir, { recursive: true, force: true });
  }
  if (!best) {
    throw new Error(`all ${options.trials} trials failed: ${JSON.stringify(failures)}`);
  }
  return { best: best.model, bestTrial: best.record, history, failures };
}

export function historyDocument(result: SearchResult) {
  return {
    trials: result.history,
    failures: result.failures,
    best_trial: result.bestTrial.trial,
  };
}
