/**
 * Training loop and model persistence. A trained model file bundles the
 * layer topology and weights with everything generation needs: the
 * vocabularies, the scalers, the empirical first-event table, and the
 * training configuration.
 */

import { readFileSync, writeFileSync } from "node:fs";
import * as tf from "@tensorflow/tfjs";
import type { EncodedDataset, FirstEvent } from "./encode.js";
import { ModelConfig, buildModel } from "./model.js";
import type { Scaler } from "./scaling.js";

export interface TrainedModelMeta {
  actVocab: string[];
  roleVocab: string[];
  durScaler: Scaler;
  waitScaler: Scaler;
  firstEvents: FirstEvent[];
  maxTraceLen: number;
}

export interface TrainedModel {
  config: ModelConfig;
  meta: TrainedModelMeta;
  model: tf.LayersModel;
  finalLoss: number;
}

export function datasetTensors(dataset: EncodedDataset) {
  const n = dataset.nGram;
  const count = dataset.actInputs.length;
  const xs = [
    tf.tensor2d(dataset.actInputs, [count, n], "float32"),
    tf.tensor2d(dataset.roleInputs, [count, n], "float32"),
    tf.tensor3d(
      dataset.durInputs.map((row) => row.map((v) => [v])),
      [count, n, 1],
    ),
    tf.tensor3d(
      dataset.waitInputs.map((row) => row.map((v) => [v])),
      [count, n, 1],
    ),
  ];
  const ys = [
    tf.oneHot(tf.tensor1d(dataset.actTargets, "int32"), dataset.actVocab.length),
    tf.oneHot(tf.tensor1d(dataset.roleTargets, "int32"), dataset.roleVocab.length),
    tf.tensor2d(
      dataset.durTargets.map((d, i) => [d, dataset.waitTargets[i]]),
      [count, 2],
    ),
  ];
  return { xs, ys };
}

export function compile(model: tf.LayersModel, config: ModelConfig): void {
  model.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: ["categoricalCrossentropy", "categoricalCrossentropy", "meanSquaredError"],
  });
}

export async function train(dataset: EncodedDataset, config: ModelConfig): Promise<TrainedModel> {
  if (dataset.actInputs.length === 0) throw new Error("dataset is empty");
  const model = buildModel(config, dataset.actVocab.length, dataset.roleVocab.length);
  compile(model, config);
  const { xs, ys } = datasetTensors(dataset);
  try {
    const history = await model.fit(xs, ys, {
      epochs: config.epochs,
      batchSize: config.batchSize,
      shuffle: false,
      verbose: 0,
    });
    const losses = history.history["loss"] as number[];
    losses.forEach((loss, epoch) => {
      if (!Number.isFinite(loss)) throw new Error(`training diverged at epoch ${epoch}`);
    });
    return {
      config,
      meta: {
        actVocab: dataset.actVocab,
        roleVocab: dataset.roleVocab,
        durScaler: dataset.durScaler,
        waitScaler: dataset.waitScaler,
        firstEvents: dataset.firstEvents,
        maxTraceLen: dataset.maxTraceLen,
      },
      model,
      finalLoss: losses[losses.length - 1],
    };
  } finally {
    xs.forEach((t) => t.dispose());
    ys.forEach((t) => t.dispose());
  }
}

/** Loss on the full dataset without training (seeding checks). */
export async function initialLoss(dataset: EncodedDataset, config: ModelConfig): Promise<number> {
  const model = buildModel(config, dataset.actVocab.length, dataset.roleVocab.length);
  compile(model, config);
  const { xs, ys } = datasetTensors(dataset);
  try {
    const out = model.evaluate(xs, ys, { batchSize: config.batchSize }) as tf.Scalar[];
    const total = (await out[0].data())[0];
    out.forEach((t) => t.dispose());
    return total;
  } finally {
    xs.forEach((t) => t.dispose());
    ys.forEach((t) => t.dispose());
  }
}

export async function saveModel(trained: TrainedModel, path: string): Promise<void> {
  let captured: tf.io.ModelArtifacts | null = null;
  await trained.model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      captured = artifacts;
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(0),
          modelTopologyType: "JSON",
        },
      };
    }),
  );
  const artifacts = captured as unknown as tf.io.ModelArtifacts;
  const weightData = Buffer.from(artifacts.weightData as ArrayBuffer).toString("base64");
  const doc = {
    format: "dlgen-model",
    version: 1,
    config: trained.config,
    meta: trained.meta,
    finalLoss: trained.finalLoss,
    topology: artifacts.modelTopology,
    weightSpecs: artifacts.weightSpecs,
    weightData,
  };
  writeFileSync(path, JSON.stringify(doc), "utf-8");
}

export async function loadModel(path: string): Promise<TrainedModel> {
  const doc = JSON.parse(readFileSync(path, "utf-8"));
  if (doc.format !== "dlgen-model") throw new Error(`${path}: not a dlgen model file`);
  const weightData = new Uint8Array(Buffer.from(doc.weightData, "base64")).buffer;
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: doc.topology,
      weightSpecs: doc.weightSpecs,
      weightData,
    }),
  );
  return {
    config: doc.config,
    meta: doc.meta,
    model,
    finalLoss: doc.finalLoss,
  };
}
