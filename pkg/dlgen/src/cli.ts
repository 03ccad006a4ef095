#!/usr/bin/env node
/**
 * dlgen  train | generate | search
 *
 * Consumes: training CSV (logsim schema), pools JSON, inter-arrival
 * distribution JSON. Produces: model files, generated CSV logs, search
 * history JSON in the same schema as the discovery-side optimizer.
 */

import { parseArgs } from "node:util";
import { writeFileSync } from "node:fs";
import { readLog, writeLog, parseTimestamp } from "./csv.js";
import { loadRoles, preprocess } from "./encode.js";
import { generateLog } from "./generate.js";
import { DEFAULT_CONFIG, ModelConfig } from "./model.js";
import { loadSpec } from "./sampling.js";
import { historyDocument, randomSearch } from "./search.js";
import { loadModel, saveModel, train } from "./train.js";

function usage(): never {
  console.error(
    [
      "usage:",
      "  dlgen train    --log train.csv --pools pools.json --out model.json",
      "                 [--n 5] [--cell lstm|gru] [--arch specialized|shared_categorical|full_shared]",
      "                 [--units 32] [--emb 8] [--scaling auto|normalization|log_normalization]",
      "                 [--epochs 60] [--batch 32] [--lr 0.005] [--seed 0]",
      "  dlgen generate --model model.json --interarrival ia.json --traces 100 --out gen.csv",
      "                 [--seed 0] [--start 2024-01-01T00:00:00.000+00:00]",
      "  dlgen search   --log train.csv --pools pools.json --interarrival ia.json --out model.json",
      "                 [--cell lstm|gru] [--trials 50] [--runs 5] [--seed 0] [--history history.json]",
      "                 [--epochs 30] [--batch 32] [--lr 0.005] [--evaluate logsim]",
    ].join("\n"),
  );
  process.exit(1);
}

function opt(values: Record<string, unknown>, name: string): string {
  const v = values[name];
  if (typeof v !== "string" || v === "") {
    console.error(`missing required option --${name}`);
    usage();
  }
  return v as string;
}

function num(values: Record<string, unknown>, name: string, fallback: number): number {
  const v = values[name];
  if (v === undefined) return fallback;
  const parsed = Number(v);
  if (Number.isNaN(parsed)) {
    console.error(`option --${name} must be numeric`);
    usage();
  }
  return parsed;
}

function configFromFlags(values: Record<string, unknown>): ModelConfig {
  return {
    nGram: num(values, "n", DEFAULT_CONFIG.nGram),
    cell: (values["cell"] as ModelConfig["cell"]) ?? DEFAULT_CONFIG.cell,
    architecture:
      (values["arch"] as ModelConfig["architecture"]) ?? DEFAULT_CONFIG.architecture,
    hiddenUnits: num(values, "units", DEFAULT_CONFIG.hiddenUnits),
    embeddingDims: num(values, "emb", DEFAULT_CONFIG.embeddingDims),
    scaling: (values["scaling"] as ModelConfig["scaling"]) ?? "auto",
    epochs: num(values, "epochs", DEFAULT_CONFIG.epochs),
    batchSize: num(values, "batch", DEFAULT_CONFIG.batchSize),
    learningRate: num(values, "lr", DEFAULT_CONFIG.learningRate),
    seed: num(values, "seed", 0),
  };
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (!command) usage();
  const { values } = parseArgs({
    args: rest,
    options: {
      log: { type: "string" },
      pools: { type: "string" },
      interarrival: { type: "string" },
      model: { type: "string" },
      out: { type: "string" },
      history: { type: "string" },
      traces: { type: "string" },
      start: { type: "string" },
      n: { type: "string" },
      cell: { type: "string" },
      arch: { type: "string" },
      units: { type: "string" },
      emb: { type: "string" },
      scaling: { type: "string" },
      epochs: { type: "string" },
      batch: { type: "string" },
      lr: { type: "string" },
      seed: { type: "string" },
      trials: { type: "string" },
      runs: { type: "string" },
      evaluate: { type: "string" },
    },
  });

  if (command === "train") {
    const traces = readLog(opt(values, "log"));
    const roles = loadRoles(opt(values, "pools"));
    const config = configFromFlags(values);
    const dataset = preprocess(
      traces,
      roles,
      config.nGram,
      config.scaling === "auto" ? undefined : config.scaling,
    );
    const trained = await train(dataset, config);
    await saveModel(trained, opt(values, "out"));
    console.log(
      `trained ${config.architecture}/${config.cell} on ${dataset.actInputs.length} windows, ` +
        `final loss ${trained.finalLoss.toFixed(4)} -> ${values["out"]}`,
    );
    return 0;
  }

  if (command === "generate") {
    const trained = await loadModel(opt(values, "model"));
    const interarrival = loadSpec(opt(values, "interarrival"));
    const startText = values["start"] as string | undefined;
    const generated = await generateLog(trained, {
      numTraces: num(values, "traces", 10),
      seed: num(values, "seed", 0),
      interarrival,
      startInstantMs: startText ? parseTimestamp(startText) : 0,
    });
    writeLog(generated.traces, opt(values, "out"));
    const total = generated.traces.length;
    if (generated.cappedTraces > 0.1 * total) {
      console.warn(
        `warning: ${generated.cappedTraces}/${total} traces hit the length cap before a finalization token`,
      );
    }
    console.log(`${total} traces -> ${values["out"]}`);
    return 0;
  }

  if (command === "search") {
    const traces = readLog(opt(values, "log"));
    const roles = loadRoles(opt(values, "pools"));
    const interarrival = loadSpec(opt(values, "interarrival"));
    const evaluateCmd = (values["evaluate"] as string | undefined)?.split(" ") ?? ["logsim"];
    const result = await randomSearch(traces, roles, interarrival, {
      cell: (values["cell"] as "lstm" | "gru") ?? "lstm",
      trials: num(values, "trials", 50),
      runsPerTrial: num(values, "runs", 5),
      seed: num(values, "seed", 0),
      epochs: num(values, "epochs", 30),
      batchSize: num(values, "batch", 32),
      learningRate: num(values, "lr", 0.005),
      evaluateCommand: evaluateCmd,
    });
    await saveModel(result.best, opt(values, "out"));
    if (values["history"]) {
      writeFileSync(
        values["history"] as string,
        JSON.stringify(historyDocument(result), null, 2) + "\n",
        "utf-8",
      );
    }
    console.log(
      `best trial ${result.bestTrial.trial}: mean ELS ${result.bestTrial.mean_els.toFixed(4)} -> ${values["out"]}`,
    );
    return 0;
  }

  usage();
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(`dlgen: ${err instanceof Error ? err.message : err}`);
    process.exit(2);
  },
);
