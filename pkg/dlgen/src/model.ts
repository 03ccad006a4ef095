/**
 * The three recurrent architectures. All take four aligned inputs
 * (activity prefix, role prefix, scaled durations, scaled waits) and
 * produce a next-activity distribution, a next-role distribution, and the
 * two next time features. They differ in how much of the first recurrent
 * layer is shared:
 *
 * - specialized: one recurrent tower per input, merged only at the heads
 * - shared_categorical: activity and role embeddings concatenate into one
 *   shared tower; each time input keeps its own
 * - full_shared: a single first recurrent layer over all four inputs
 */

import * as tf from "@tensorflow/tfjs";
import type { ScalingMode } from "./scaling.js";

export type Cell = "lstm" | "gru";
export type Architecture = "specialized" | "shared_categorical" | "full_shared";

export interface ModelConfig {
  nGram: number;
  cell: Cell;
  architecture: Architecture;
  hiddenUnits: number;
  embeddingDims: number;
  scaling: ScalingMode | "auto";
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
}

export const DEFAULT_CONFIG: ModelConfig = {
  nGram: 5,
  cell: "lstm",
  architecture: "full_shared",
  hiddenUnits: 32,
  embeddingDims: 8,
  scaling: "auto",
  epochs: 60,
  batchSize: 32,
  learningRate: 0.005,
  seed: 0,
};

export function buildModel(
  config: ModelConfig,
  actVocabSize: number,
  roleVocabSize: number,
): tf.LayersModel {
  const n = config.nGram;
  let seedCounter = config.seed;
  const nextSeed = () => ++seedCounter;

  const actIn = tf.input({ shape: [n], name: "activity_prefix" });
  const roleIn = tf.input({ shape: [n], name: "role_prefix" });
  const durIn = tf.input({ shape: [n, 1], name: "duration_prefix" });
  const waitIn = tf.input({ shape: [n, 1], name: "wait_prefix" });

  const embed = (input: tf.SymbolicTensor, vocab: number, name: string) =>
    tf.layers
      .embedding({
        inputDim: vocab,
        outputDim: config.embeddingDims,
        embeddingsInitializer: tf.initializers.randomUniform({
          minval: -0.05,
          maxval: 0.05,
          seed: nextSeed(),
        }),
        name,
      })
      .apply(input) as tf.SymbolicTensor;

  const recurrent = (input: tf.SymbolicTensor, name: string) => {
    const opts = {
      units: config.hiddenUnits,
      returnSequences: false,
      kernelInitializer: tf.initializers.glorotUniform({ seed: nextSeed() }),
      recurrentInitializer: tf.initializers.glorotUniform({ seed: nextSeed() }),
      name,
    };
    const layer = config.cell === "lstm" ? tf.layers.lstm(opts) : tf.layers.gru(opts);
    return layer.apply(input) as tf.SymbolicTensor;
  };

  const actEmb = embed(actIn, actVocabSize, "activity_embedding");
  const roleEmb = embed(roleIn, roleVocabSize, "role_embedding");

  let merged: tf.SymbolicTensor;
  if (config.architecture === "specialized") {
    merged = tf.layers.concatenate().apply([
      recurrent(actEmb, "activity_tower"),
      recurrent(roleEmb, "role_tower"),
      recurrent(durIn, "duration_tower"),
      recurrent(waitIn, "wait_tower"),
    ]) as tf.SymbolicTensor;
  } else if (config.architecture === "shared_categorical") {
    const categorical = tf.layers
      .concatenate()
      .apply([actEmb, roleEmb]) as tf.SymbolicTensor;
    merged = tf.layers.concatenate().apply([
      recurrent(categorical, "categorical_tower"),
      recurrent(durIn, "duration_tower"),
      recurrent(waitIn, "wait_tower"),
    ]) as tf.SymbolicTensor;
  } else {
    const everything = tf.layers
      .concatenate()
      .apply([actEmb, roleEmb, durIn, waitIn]) as tf.SymbolicTensor;
    merged = recurrent(everything, "shared_tower");
  }

  const dense = (units: number, activation: string, name: string) =>
    tf.layers.dense({
      units,
      activation: activation as any,
      kernelInitializer: tf.initializers.glorotUniform({ seed: nextSeed() }),
      name,
    });

  const actOut = dense(actVocabSize, "softmax", "next_activity").apply(merged) as tf.SymbolicTensor;
  const roleOut = dense(roleVocabSize, "softmax", "next_role").apply(merged) as tf.SymbolicTensor;
  const timesOut = dense(2, "sigmoid", "next_times").apply(merged) as tf.SymbolicTensor;

  return tf.model({
    inputs: [actIn, roleIn, durIn, waitIn],
    outputs: [actOut, roleOut, timesOut],
  });
}

/** Names of the recurrent layers in a built model (for structure checks). */
export function recurrentLayerNames(model: tf.LayersModel): string[] {
  return model.layers
    .filter((l) => l.getClassName() === "LSTM" || l.getClassName() === "GRU")
    .map((l) => l.name);
}
